#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksl/integrator.hpp"
#include "ksl/line.hpp"

namespace ksl {

struct Gauge {
    std::function<IntervalSpec(const Point&)> at;
    std::string description;
    // points that only tag themselves; cousin_partition cuts there first
    std::vector<Point> anchors;
};

struct Cell {
    Point left, right, tag;
};

struct TaggedPartition {
    std::vector<Cell> cells;
    std::vector<Point> division() const;
};

enum class TagPolicy { Endpoints, MidpointFirst };

// (a,b] inside D, the fineness rule used throughout; a == b is always inside
bool halfopen_inside(const Line& K, const Point& a, const Point& b, const IntervalSpec& D);
// the stricter [a,b] inside D
bool closed_inside(const Line& K, const Point& a, const Point& b, const IntervalSpec& D);

bool cell_is_fine(const Line& K, const Cell& c, const Gauge& delta);
bool is_delta_fine(const Line& K, const TaggedPartition& P, const Gauge& delta);
bool is_delta_fine_closed(const Line& K, const TaggedPartition& P, const Gauge& delta);
// 0_K = x_0 <= ... <= x_n = 1_K, contiguous, tags inside cells
bool is_valid_partition(const Line& K, const TaggedPartition& P);

void cousin_visit(const Line& K, const Gauge& delta, int max_depth, TagPolicy policy,
                  const std::function<void(const Cell&)>& emit);
TaggedPartition cousin_partition(const Line& K, const Gauge& delta, int max_depth = 256,
                                 TagPolicy policy = TagPolicy::Endpoints);

double riemann_sum(const PointFn& f, const Integrator& G, const TaggedPartition& P);

Gauge whole_line_gauge(const Line& K);
// (x - r, x + r) on real/split lines, {x} at isolated points
Gauge radius_gauge(const Line& K, double r);
Gauge singleton_gauge(const Line& K);

// level-k gauge of the integration ladder
Gauge ladder_gauge(const Line& K, int level, std::vector<Point> critical, std::vector<double> singular);

}  // namespace ksl
