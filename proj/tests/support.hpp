#pragma once

// random specimens shared by the unit tests and the acceptance runner

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "ksl/builtins.hpp"
#include "ksl/integrator.hpp"
#include "ksl/line.hpp"

namespace ksl::testing {

using Rng = std::mt19937_64;

// k/8 with |k| <= 16: sums of a few of these are exact in binary64
inline double eighth(Rng& rng, int lo = -16, int hi = 16) {
    return std::uniform_int_distribution<int>(lo, hi)(rng) / 8.0;
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Line random_split_line(Rng& rng) {
    int k = uniform(rng, 1, 3);
    std::vector<double> s;
    for (int i = 1; i <= k; ++i) s.push_back(static_cast<double>(i) / (k + 1));
    return Line::split(0.0, 1.0, s);
}

// strictly increasing distinct points of K
inline std::vector<Point> random_points(Rng& rng, const Line& K, int count) {
    std::vector<Point> pts;
    switch (K.family()) {
        case Family::Finite:
            for (std::int64_t i = 0; i < K.size(); ++i) pts.push_back(Point::finite(i));
            break;
        case Family::Ordinal:
            for (std::int32_t q = 0; q <= K.limit_count(); ++q)
                for (std::int64_t r = 0; r < 6; ++r)
                    if (q < K.limit_count() || r <= K.tail_length()) pts.push_back(Point::ordinal(q, r));
            break;
        default:
            for (int i = 1; i < 32; ++i) pts.push_back(K.at(i / 32.0, Side::Minus));
            for (double s : K.splits()) pts.push_back(Point::split(s, Side::Plus));
            pts.push_back(K.one());
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    pts.resize(std::min<std::size_t>(pts.size(), static_cast<std::size_t>(count)));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // 0_K carries G(0_K) via `before`, not as a jump point
    if (!pts.empty() && pts.front() == K.zero()) pts.erase(pts.begin());
    return pts;
}

inline std::shared_ptr<StepNBV> random_step(Rng& rng, const Line& K, int max_jumps = 5) {
    auto pts = random_points(rng, K, uniform(rng, 1, max_jumps));
    std::vector<double> jumps;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double j = 0;
        while (j == 0) j = eighth(rng);
        jumps.push_back(j);
    }
    return StepNBV::from_jumps(K, pts, jumps, eighth(rng));
}

inline Line random_line(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
        case 0: return Line::finite(uniform(rng, 2, 10));
        case 1: return Line::real(0.0, 1.0);
        case 2: return Line::ordinal(uniform(rng, 1, 2), uniform(rng, 0, 3));
        default: return random_split_line(rng);
    }
}

// a*sin(b x) + c x on a real line, with derivative
inline std::shared_ptr<SmoothNBV> random_smooth(Rng& rng) {
    double a = eighth(rng, -8, 8), b = uniform(rng, 1, 12), c = eighth(rng, -8, 8);
    SmoothSpec s;
    s.g = [a, b, c](double x) { return a * std::sin(b * x) + c * x; };
    s.dg = [a, b, c](double x) { return a * b * std::cos(b * x) + c; };
    s.name = "a sin(bx) + cx";
    return std::make_shared<SmoothNBV>(Line::real(0.0, 1.0), s);
}

inline std::vector<Point> sorted_sample(const Line& K, std::size_t n, Rng& rng) {
    std::vector<Point> out;
    switch (K.family()) {
        case Family::Finite:
            for (std::int64_t i = 0; i < K.size(); ++i) out.push_back(Point::finite(i));
            break;
        case Family::Ordinal:
            for (std::int32_t q = 0; q <= K.limit_count(); ++q) {
                std::int64_t top = q < K.limit_count() ? static_cast<std::int64_t>(n / (K.limit_count() + 1)) : K.tail_length();
                for (std::int64_t r = 0; r <= top; ++r) out.push_back(Point::ordinal(q, r));
            }
            break;
        default: {
            std::uniform_real_distribution<double> u(K.lo(), K.hi());
            for (std::size_t i = 0; i < n; ++i) out.push_back(K.at(u(rng), Side::Minus));
            for (double s : K.splits()) {
                out.push_back(Point::split(s, Side::Minus));
                out.push_back(Point::split(s, Side::Plus));
            }
            out.push_back(K.zero());
            out.push_back(K.one());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ksl::testing
