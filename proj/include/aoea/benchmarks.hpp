#pragma once

/// @file benchmarks.hpp
/// @brief The fifteen real-valued benchmark functions, sorted by hardness.
///
/// Several formulas as commonly printed are internally inconsistent with
/// their stated optima. Each such function has an AsPrinted form and a
/// Repaired form; Repaired is the default:
///   - Jong 3:     sum |x_i|^i instead of sum x_i^i
///   - Shubert:    sum i*cos((i+1)x + i) instead of sum cos((i+1)x + i)
///   - Rosenbrock: 100*(x_{i+1} - x_i^2)^2 instead of the unsquared term
///   - Schwefel:   418.9829*n - sum(...) instead of 418.9829*n * sum(...)

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoea/core.hpp"

namespace aoea::benchmarks {

enum class Variant { AsPrinted, Repaired };

struct BenchmarkSpec {
    int id;
    std::string_view name;
    std::string_view key;  ///< CLI identifier, e.g. "rastrigin"
    std::size_t default_dimensionality;
    std::size_t fixed_dimensionality;  ///< 0 when any dimensionality is accepted
    double lower_bound;
    double upper_bound;
    Direction direction;
    bool has_variants;
};

inline constexpr std::size_t kBenchmarkCount = 15;

inline constexpr std::array<BenchmarkSpec, kBenchmarkCount> kBenchmarks{{
    {1, "Jong 1", "jong1", 1000, 0, -5.12, 5.12, Direction::Minimize, false},
    {2, "Jong 2", "jong2", 1000, 0, -5.12, 5.12, Direction::Minimize, false},
    {3, "Jong 3", "jong3", 1000, 0, -1.0, 1.0, Direction::Minimize, true},
    {4, "Himmelblau", "himmelblau", 2, 2, -6.0, 6.0, Direction::Minimize, false},
    {5, "Two peak trap", "two-peak-trap", 1, 0, -15.0, 15.0, Direction::Minimize, false},
    {6, "Central two peak trap", "central-two-peak-trap", 1, 0, -15.0, 15.0, Direction::Minimize, false},
    {7, "H1", "h1", 2, 2, -100.0, 100.0, Direction::Maximize, false},
    {8, "Ackley", "ackley", 1000, 0, -5.0, 5.0, Direction::Minimize, false},
    {9, "Shubert 2D", "shubert", 2, 2, -5.12, 5.12, Direction::Minimize, true},
    {10, "Griewangk", "griewangk", 1000, 0, -600.0, 600.0, Direction::Minimize, false},
    {11, "Rastrigin", "rastrigin", 1000, 0, -5.12, 5.12, Direction::Minimize, false},
    {12, "Schaffer", "schaffer", 1000, 0, -100.0, 100.0, Direction::Minimize, false},
    {13, "Rosenbrock", "rosenbrock", 1000, 0, -2.048, 2.048, Direction::Minimize, true},
    {14, "Bohachevsky", "bohachevsky", 1000, 0, -100.0, 100.0, Direction::Minimize, false},
    {15, "Schwefel", "schwefel", 1000, 0, -500.0, 500.0, Direction::Minimize, true},
}};

inline std::span<const BenchmarkSpec> list_benchmarks() { return kBenchmarks; }

inline const BenchmarkSpec& spec(int id) {
    if (id < 1 || id > static_cast<int>(kBenchmarkCount)) {
        throw std::out_of_range("unknown benchmark id " + std::to_string(id));
    }
    return kBenchmarks[static_cast<std::size_t>(id - 1)];
}

/// Accepts a numeric id ("11") or a key/name, case-insensitively ("Rastrigin").
inline int resolve(std::string_view token) {
    auto lower = [](std::string_view s) {
        std::string out;
        for (char c : s) {
            if (c == ' ' || c == '_') c = '-';
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        return out;
    };
    if (!token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        const int id = std::stoi(std::string(token));
        (void)spec(id);
        return id;
    }
    const std::string t = lower(token);
    for (const auto& s : kBenchmarks) {
        if (t == s.key || t == lower(s.name)) return s.id;
    }
    throw std::out_of_range("unknown benchmark '" + std::string(token) + "'");
}

inline Variant parse_variant(std::string_view v) {
    if (v == "repaired") return Variant::Repaired;
    if (v == "as-printed" || v == "asprinted" || v == "printed") return Variant::AsPrinted;
    throw std::invalid_argument("unknown variant '" + std::string(v) + "'");
}

inline std::string_view variant_name(Variant v) { return v == Variant::Repaired ? "repaired" : "as-printed"; }

namespace detail {

using std::numbers::e;
using std::numbers::pi;

inline double sq(double v) { return v * v; }

inline double jong1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double jong2(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 2) * x[i] * x[i];
    return s;
}

inline double jong3(std::span<const double> x, Variant v) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double base = v == Variant::Repaired ? std::abs(x[i]) : x[i];
        s += std::pow(base, static_cast<double>(i + 1));
    }
    return s;
}

inline double himmelblau(std::span<const double> x) {
    return sq(x[0] * x[0] + x[1] - 11.0) + sq(x[0] + x[1] * x[1] - 7.0);
}

inline double two_peak_trap(double x) {
    if (x >= 10.0 && x < 15.0) return 160.0 / 15.0 * (15.0 - x);
    return 200.0 / 5.0 * (x - 15.0);
}

inline double central_two_peak_trap(double x) {
    if (x < 10.0) return 160.0 / 15.0 * x;
    if (x < 15.0) return 160.0 / 15.0 * (15.0 - x);
    return 200.0 / 5.0 * (x - 15.0);
}

inline double h1(std::span<const double> x) {
    const double num = sq(std::sin(x[0] - x[1] / 8.0)) + sq(std::sin(x[1] + x[0] / 8.0));
    return num / std::sqrt(sq(x[0] - 8.6998) + sq(x[1] - 6.7665) + 1.0);
}

inline double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double s2 = 0.0, sc = 0.0;
    for (double v : x) {
        s2 += v * v;
        sc += std::cos(2.0 * pi * v);
    }
    return 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(s2 / n)) + e - std::exp(sc / n);
}

inline double shubert(std::span<const double> x, Variant v) {
    auto factor = [v](double xi) {
        double s = 0.0;
        for (int i = 1; i <= 5; ++i) {
            const double w = v == Variant::Repaired ? static_cast<double>(i) : 1.0;
            s += w * std::cos((i + 1) * xi + i);
        }
        return s;
    };
    return factor(x[0]) * factor(x[1]);
}

inline double griewangk(std::span<const double> x) {
    double s = 0.0, p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * x[i];
        p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return s / 4000.0 - p + 1.0;
}

inline double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
    return s;
}

inline double schaffer(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double r = x[i] * x[i] + x[i + 1] * x[i + 1];
        s += std::pow(r, 0.25) * (sq(std::sin(50.0 * std::pow(r, 0.1))) + 1.0);
    }
    return s;
}

inline double rosenbrock(std::span<const double> x, Variant v) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double t = x[i + 1] - x[i] * x[i];
        s += 100.0 * (v == Variant::Repaired ? t * t : t) + sq(1.0 - x[i]);
    }
    return s;
}

inline double bohachevsky(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        s += x[i] * x[i] + 2.0 * x[i + 1] * x[i + 1] - 0.3 * std::cos(3.0 * pi * x[i]) -
             0.4 * std::cos(4.0 * pi * x[i + 1]) + 0.7;
    }
    return s;
}

inline double schwefel(std::span<const double> x, Variant v) {
    double s = 0.0;
    for (double xi : x) s += xi * std::sin(std::sqrt(std::abs(xi)));
    const double scale = 418.9829 * static_cast<double>(x.size());
    return v == Variant::Repaired ? scale - s : scale * s;
}

}  // namespace detail

/// Raw formula value; no bound or dimensionality checks.
inline double formula(int id, Variant variant, std::span<const double> x) {
    using namespace detail;
    switch (id) {
        case 1: return jong1(x);
        case 2: return jong2(x);
        case 3: return jong3(x, variant);
        case 4: return himmelblau(x);
        case 5: {
            double s = 0.0;
            for (double v : x) s += two_peak_trap(v);
            return s;
        }
        case 6: {
            double s = 0.0;
            for (double v : x) s += central_two_peak_trap(v);
            return s;
        }
        case 7: return h1(x);
        case 8: return ackley(x);
        case 9: return shubert(x, variant);
        case 10: return griewangk(x);
        case 11: return rastrigin(x);
        case 12: return schaffer(x);
        case 13: return rosenbrock(x, variant);
        case 14: return bohachevsky(x);
        case 15: return schwefel(x, variant);
        default: throw std::out_of_range("unknown benchmark id " + std::to_string(id));
    }
}

inline std::size_t check_dimensionality(const BenchmarkSpec& s, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("dimensionality must be positive");
    if (s.fixed_dimensionality != 0 && dim != s.fixed_dimensionality) {
        throw std::invalid_argument(std::string(s.name) + " is defined only for dimensionality " +
                                    std::to_string(s.fixed_dimensionality));
    }
    return dim;
}

/// Checked evaluation: rejects wrong dimensionality and out-of-bounds input.
inline double evaluate(int id, Variant variant, std::span<const double> x) {
    const auto& s = spec(id);
    check_dimensionality(s, x.size());
    for (double v : x) {
        if (!(v >= s.lower_bound && v <= s.upper_bound)) {
            throw std::domain_error(std::string(s.name) + ": input outside [" +
                                    std::to_string(s.lower_bound) + ", " + std::to_string(s.upper_bound) + "]");
        }
    }
    return formula(id, variant, x);
}

/// Builds a Problem. `dim` = 0 selects the default dimensionality.
inline Problem make_problem(int id, std::size_t dim = 0, Variant variant = Variant::Repaired) {
    const auto& s = spec(id);
    if (s.fixed_dimensionality != 0 && dim != 0 && dim != s.fixed_dimensionality) {
        // Fixed-dimensional functions ignore a global dimensionality override.
        dim = s.fixed_dimensionality;
    }
    Problem p;
    p.id = s.id;
    p.name = std::string(s.name);
    p.dimensionality = check_dimensionality(s, dim == 0 ? s.default_dimensionality : dim);
    p.lower_bound = s.lower_bound;
    p.upper_bound = s.upper_bound;
    p.direction = s.direction;
    p.objective = [id, variant](std::span<const double> x) { return formula(id, variant, x); };
    return p;
}

struct KnownOptimum {
    RealGenome point;
    double value;
    double tolerance;
};

/// Known optimum at the given dimensionality, where one is defined under
/// the Repaired reading. Traps (5, 6) have none.
inline std::optional<KnownOptimum> known_optimum(int id, std::size_t dim) {
    switch (id) {
        case 1: case 2: case 3: case 8: case 10: case 11: case 12: case 14:
            return KnownOptimum{RealGenome(dim, 0.0), 0.0, 1e-9};
        case 4: return KnownOptimum{{3.0, 2.0}, 0.0, 1e-9};
        case 7: return KnownOptimum{{8.6998, 6.7665}, 2.0, 1e-4};
        case 9: return KnownOptimum{{-1.42513, -0.80032}, -186.7309, 1e-3};
        case 13: return KnownOptimum{RealGenome(dim, 1.0), 0.0, 1e-9};
        case 15: return KnownOptimum{RealGenome(dim, 420.9687), 0.0, 1e-3 * static_cast<double>(dim)};
        default: return std::nullopt;
    }
}

}  // namespace aoea::benchmarks
