/**
 * @file geometry.hpp
 * @brief Planar region algebra on finite unions of convex polygons.
 */
#pragma once

#include <vector>

namespace rids::geo {

inline constexpr double kDefaultAreaTol = 1e-9;
inline constexpr int kDefaultArcSegments = 32;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Convex polygon, counter-clockwise vertex order.
using Polygon = std::vector<Vec2>;

/// Union of convex parts. Parts may overlap; no parts means the empty region.
struct Region {
    std::vector<Polygon> parts;

    bool has_parts() const { return !parts.empty(); }
};

struct SectorSpec {
    Vec2 center;
    double radius = 1.0;
    double heading = 0.0;
    double angMin = 0.0;
    double angMax = 0.0;
    int arcSegments = kDefaultArcSegments;
};

double polygon_area(const Polygon& p);

Region region_from_rect(double xMin, double xMax, double yMin, double yMax);

/// Inscribed polygonal approximation of a disc sector. Spans wider than pi are
/// split into convex sub-sectors; a full turn yields a single regular polygon.
Region region_from_sector(const SectorSpec& spec);

/// Axis-aligned square of half-width h centred on p.
Region region_square(Vec2 p, double h);

Region intersect(const Region& a, const Region& b);
Region difference(const Region& a, const Region& b);
Region unite(const Region& a, const Region& b);

/// Measure of the union; overlapping parts are counted once.
double area(const Region& a);
bool is_empty(const Region& a, double areaTol = kDefaultAreaTol);
bool is_subset(const Region& a, const Region& b, double areaTol = kDefaultAreaTol);
bool region_equal(const Region& a, const Region& b, double areaTol = kDefaultAreaTol);
bool contains_point(const Region& a, Vec2 p);

/// Throws std::invalid_argument if a part is degenerate, clockwise or non-finite.
void validate(const Region& r);

}  // namespace rids::geo
