#include <gtest/gtest.h>

#include <random>

#include "ksl/errors.hpp"
#include "ksl/line.hpp"

using namespace ksl;

namespace {

const Line kSplit = Line::split(0.0, 1.0, {0.5});

Point random_point(std::mt19937_64& rng, const Line& K) {
    std::uniform_real_distribution<double> u(K.lo(), K.hi());
    switch (K.family()) {
        case Family::Finite: return Point::finite(std::uniform_int_distribution<std::int64_t>(0, K.size() - 1)(rng));
        case Family::Real: return Point::real(std::uniform_int_distribution<int>(0, 16)(rng) / 16.0);
        case Family::Ordinal: {
            auto q = std::uniform_int_distribution<std::int32_t>(0, K.limit_count())(rng);
            std::int64_t top = q == K.limit_count() ? K.tail_length() : 6;
            return Point::ordinal(q, std::uniform_int_distribution<std::int64_t>(0, top)(rng));
        }
        case Family::Split: {
            double x = std::uniform_int_distribution<int>(0, 8)(rng) / 8.0;
            if (K.is_split_value(x)) return Point::split(x, std::uniform_int_distribution<int>(0, 1)(rng) ? Side::Plus : Side::Minus);
            return Point::split(x);
        }
    }
    return K.zero();
}

std::vector<Line> families() {
    return {Line::finite(7), Line::real(0.0, 1.0), Line::ordinal(2, 3), Line::split(0.0, 1.0, {0.25, 0.5})};
}

}  // namespace

TEST(LineOrder, Examples) {
    EXPECT_LT(Point::ordinal(0, 3), Point::ordinal(1, 0));
    EXPECT_LT(Point::split(0.5, Side::Minus), Point::split(0.5, Side::Plus));
    EXPECT_EQ(Point::real(0.25), Point::real(0.25));
}

TEST(LineOrder, MixedFamiliesRejected) { EXPECT_THROW((void)(Point::real(0.1) < Point::finite(1)), UsageError); }

TEST(LineOrder, TrichotomyAndTransitivity) {
    std::mt19937_64 rng(11);
    for (const Line& K : families()) {
        for (int i = 0; i < 10000; ++i) {
            Point a = random_point(rng, K), b = random_point(rng, K), c = random_point(rng, K);
            int rel = (a < b) + (a == b) + (b < a);
            ASSERT_EQ(rel, 1) << to_string(a) << " " << to_string(b);
            if (a < b && b < c) ASSERT_LT(a, c);
            if (a <= b && b <= c) ASSERT_LE(a, c);
        }
    }
}

TEST(LineIsolation, Examples) {
    Line F = Line::finite(5);
    EXPECT_TRUE(F.is_left_isolated(Point::finite(3)));
    EXPECT_EQ(F.predecessor(Point::finite(3)), Point::finite(2));
    Line O = Line::ordinal(1, 2);
    EXPECT_TRUE(O.is_left_dense(Point::ordinal(1, 0)));
    EXPECT_TRUE(kSplit.is_left_isolated(Point::split(0.5, Side::Plus)));
    EXPECT_EQ(kSplit.predecessor(Point::split(0.5, Side::Plus)), Point::split(0.5, Side::Minus));
    EXPECT_FALSE(Line::real(0, 1).is_left_dense(Point::real(0)));
    EXPECT_TRUE(Line::real(0, 1).is_left_dense(Point::real(1)));
}

TEST(LineNeighbours, Examples) {
    EXPECT_EQ(Line::finite(5).successor(Point::finite(2)), Point::finite(3));
    EXPECT_EQ(Line::ordinal(1, 5).predecessor(Point::ordinal(1, 3)), Point::ordinal(1, 2));
    EXPECT_EQ(kSplit.successor(Point::split(0.5, Side::Minus)), Point::split(0.5, Side::Plus));
    EXPECT_THROW(Line::real(0, 1).predecessor(Point::real(0.5)), PreconditionError);
}

TEST(LineBetween, Examples) {
    auto m = Line::real(0, 1).between(Point::real(0), Point::real(1));
    ASSERT_TRUE(m);
    EXPECT_EQ(*m, Point::real(0.5));
    EXPECT_FALSE(Line::finite(5).between(Point::finite(2), Point::finite(3)));
    auto w = Line::ordinal(1, 2).between(Point::ordinal(0, 5), Point::ordinal(1, 1));
    ASSERT_TRUE(w);
    EXPECT_EQ(*w, Point::ordinal(1, 0));
}

TEST(LineApproach, Examples) {
    EXPECT_EQ(Line::real(0, 1).left_approach(Point::real(1), 3), Point::real(0.875));
    EXPECT_EQ(Line::ordinal(1, 2).left_approach(Point::ordinal(1, 0), 4), Point::ordinal(0, 4));
    Point p = kSplit.left_approach(Point::split(0.5, Side::Minus), 2);
    EXPECT_EQ(p.x, 0.375);
    EXPECT_EQ(p.side, Side::Whole);
}

TEST(LineApproach, StrictlyIncreasingToTarget) {
    for (const Line& K : families()) {
        if (K.family() == Family::Finite) continue;
        std::vector<Point> targets;
        if (K.is_left_dense(K.one())) targets.push_back(K.one());
        if (K.family() == Family::Ordinal) targets.push_back(Point::ordinal(1, 0));
        if (K.family() == Family::Split) targets.push_back(Point::split(0.5, Side::Minus));
        for (const Point& p : targets) {
            for (int k = 1; k < 30; ++k) {
                Point a = K.left_approach(p, k), b = K.left_approach(p, k + 1);
                ASSERT_LT(a, b) << K.describe() << " " << to_string(p) << " k=" << k;
                ASSERT_LT(b, p);
            }
            if (K.family() != Family::Ordinal) EXPECT_LT(p.x - K.left_approach(p, 40).x, 1e-11);
        }
        Point z = K.zero();
        if (K.is_right_dense(z))
            for (int k = 1; k < 30; ++k) ASSERT_LT(K.right_approach(z, k + 1), K.right_approach(z, k));
    }
}

TEST(LineNeighbours, InversesAndBetween) {
    std::mt19937_64 rng(12);
    for (const Line& K : families()) {
        for (int i = 0; i < 2000; ++i) {
            Point a = random_point(rng, K);
            if (!K.is_max(a) && K.is_right_isolated(a)) {
                Point s = K.successor(a);
                ASSERT_EQ(K.predecessor(s), a);
                ASSERT_FALSE(K.between(a, s));
            }
            if (!K.is_min(a) && K.is_left_isolated(a)) ASSERT_EQ(K.successor(K.predecessor(a)), a);
            Point b = random_point(rng, K);
            if (a < b) {
                bool adjacent = K.is_right_isolated(a) && K.successor(a) == b;
                ASSERT_EQ(!K.between(a, b).has_value(), adjacent) << to_string(a) << " " << to_string(b);
            }
        }
    }
}

TEST(LineCanonical, Examples) {
    Line R = Line::real(0, 1);
    IntervalSpec I{Point::real(0.2), false, Point::real(0.7), false};
    EXPECT_EQ(canonicalize(R, I), I);

    IntervalSpec S{Point::split(0.2), false, Point::split(0.5, Side::Plus), false};
    IntervalSpec want{Point::split(0.2), false, Point::split(0.5, Side::Minus), true};
    EXPECT_EQ(canonicalize(kSplit, S), want);

    Line F = Line::finite(6);
    IntervalSpec head{F.zero(), true, Point::finite(3), false};
    IntervalSpec got = canonicalize(F, head);
    EXPECT_EQ(got.left, F.zero());
    EXPECT_TRUE(got.left_closed);
    EXPECT_EQ(got.right, Point::finite(2));
    EXPECT_TRUE(got.right_closed);
}

TEST(LineCanonical, RejectsNonOpen) {
    Line R = Line::real(0, 1);
    EXPECT_THROW(canonicalize(R, {Point::real(0.2), true, Point::real(0.7), false}), RepresentationError);
    EXPECT_THROW(canonicalize(R, {Point::real(0.7), false, Point::real(0.2), false}), RepresentationError);
}

TEST(LineCanonical, IdempotentAndNonOverlapping) {
    std::mt19937_64 rng(13);
    for (const Line& K : families()) {
        std::vector<IntervalSpec> made;
        for (int i = 0; i < 3000 && made.size() < 200; ++i) {
            Point a = random_point(rng, K), b = random_point(rng, K);
            if (b < a) std::swap(a, b);
            IntervalSpec I{a, rng() % 2 == 0, b, rng() % 2 == 0};
            IntervalSpec C;
            try {
                C = canonicalize(K, I);
            } catch (const RepresentationError&) {
                continue;
            }
            ASSERT_TRUE(is_canonical(K, C)) << to_string(C);
            ASSERT_EQ(canonicalize(K, C), C);
            made.push_back(C);
        }
        ASSERT_GT(made.size(), 20u);
        // probe points fine enough to witness any intersection of these intervals
        std::vector<Point> probe;
        if (K.family() == Family::Finite) {
            for (std::int64_t i = 0; i < K.size(); ++i) probe.push_back(Point::finite(i));
        } else if (K.family() == Family::Ordinal) {
            for (std::int32_t q = 0; q <= K.limit_count(); ++q)
                for (std::int64_t r = 0; r <= 8; ++r)
                    if (q < K.limit_count() || r <= K.tail_length()) probe.push_back(Point::ordinal(q, r));
        } else {
            for (int i = 0; i <= 64; ++i) {
                double x = i / 64.0;
                if (K.is_split_value(x)) {
                    probe.push_back(Point::split(x, Side::Minus));
                    probe.push_back(Point::split(x, Side::Plus));
                } else {
                    probe.push_back(K.at(x));
                }
            }
        }
        for (const auto& I : made)
            for (const auto& J : made) {
                bool meet = false, before = true;
                for (const Point& p : probe) {
                    if (contains(K, I, p) && contains(K, J, p)) meet = true;
                    if (contains(K, J, p))
                        for (const Point& q : probe)
                            if (contains(K, I, q) && !(q < p)) before = false;
                }
                if (meet || !before) continue;
                ASSERT_LE(I.right, J.left) << to_string(I) << " " << to_string(J);
            }
    }
}

TEST(LineDivision, NestedAndOrdered) {
    for (const Line& K : families()) {
        auto d3 = K.division(3), d4 = K.division(4);
        ASSERT_EQ(d3.front(), K.zero());
        ASSERT_EQ(d3.back(), K.one());
        for (std::size_t i = 1; i < d4.size(); ++i) ASSERT_LT(d4[i - 1], d4[i]);
        for (const Point& p : d3) ASSERT_TRUE(std::find(d4.begin(), d4.end(), p) != d4.end()) << to_string(p);
    }
}

TEST(LineBuild, Validation) {
    EXPECT_THROW(Line::finite(1), UsageError);
    EXPECT_THROW(Line::real(1, 0), UsageError);
    EXPECT_THROW(Line::split(0, 1, {0.6, 0.3}), UsageError);
    EXPECT_THROW(Line::real(0, 1).check(Point::real(2)), UsageError);
}
