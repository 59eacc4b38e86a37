#include "rids/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rids::geo {

namespace {

// Parts smaller than this are clipping residue and are discarded.
constexpr double kSliverArea = 1e-14;
constexpr double kMergeDist2 = 1e-24;

struct Box {
    double xMin, xMax, yMin, yMax;
};

Box bounds(const Polygon& p) {
    Box b{p[0].x, p[0].x, p[0].y, p[0].y};
    for (const Vec2& v : p) {
        b.xMin = std::min(b.xMin, v.x);
        b.xMax = std::max(b.xMax, v.x);
        b.yMin = std::min(b.yMin, v.y);
        b.yMax = std::max(b.yMax, v.y);
    }
    return b;
}

bool boxes_overlap(const Box& a, const Box& b) {
    return a.xMin <= b.xMax && b.xMin <= a.xMax && a.yMin <= b.yMax && b.yMin <= a.yMax;
}

// Keeps the part of p on the left of the directed line a->b (or the right when
// keepLeft is false). Sutherland-Hodgman against a single half-plane.
Polygon clip_halfplane(const Polygon& p, Vec2 a, Vec2 b, bool keepLeft) {
    Polygon out;
    if (p.empty()) return out;
    const Vec2 d = b - a;
    const double sign = keepLeft ? 1.0 : -1.0;
    out.reserve(p.size() + 2);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 cur = p[i];
        const Vec2 nxt = p[(i + 1) % p.size()];
        const double sc = sign * cross(d, cur - a);
        const double sn = sign * cross(d, nxt - a);
        if (sc >= 0.0) out.push_back(cur);
        if ((sc >= 0.0) != (sn >= 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

// Drops repeated vertices; returns false when the remainder is not a proper polygon.
bool tidy(Polygon& p) {
    Polygon q;
    q.reserve(p.size());
    for (const Vec2& v : p) {
        if (!q.empty()) {
            const Vec2 d = v - q.back();
            if (dot(d, d) < kMergeDist2) continue;
        }
        q.push_back(v);
    }
    while (q.size() > 1) {
        const Vec2 d = q.front() - q.back();
        if (dot(d, d) >= kMergeDist2) break;
        q.pop_back();
    }
    if (q.size() < 3 || polygon_area(q) <= kSliverArea) return false;
    p = std::move(q);
    return true;
}

Polygon clip_convex(const Polygon& p, const Polygon& q) {
    Polygon r = p;
    for (std::size_t i = 0; i < q.size() && !r.empty(); ++i) {
        r = clip_halfplane(r, q[i], q[(i + 1) % q.size()], true);
    }
    return r;
}

// p \ q as disjoint convex pieces: peel off the outside of each edge of q in turn.
void convex_difference(const Polygon& p, const Polygon& q, std::vector<Polygon>& out) {
    if (!boxes_overlap(bounds(p), bounds(q))) {
        out.push_back(p);
        return;
    }
    Polygon rest = p;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec2 a = q[i];
        const Vec2 b = q[(i + 1) % q.size()];
        Polygon outside = clip_halfplane(rest, a, b, false);
        if (tidy(outside)) out.push_back(std::move(outside));
        rest = clip_halfplane(rest, a, b, true);
        if (!tidy(rest)) return;
    }
}

std::vector<Polygon> subtract_all(const Polygon& p, const std::vector<Polygon>& subtrahend) {
    std::vector<Polygon> pieces{p};
    for (const Polygon& q : subtrahend) {
        std::vector<Polygon> next;
        for (const Polygon& piece : pieces) convex_difference(piece, q, next);
        pieces = std::move(next);
        if (pieces.empty()) break;
    }
    return pieces;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double polygon_area(const Polygon& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * s;
}

Region region_from_rect(double xMin, double xMax, double yMin, double yMax) {
    require_finite(xMin, "xMin");
    require_finite(xMax, "xMax");
    require_finite(yMin, "yMin");
    require_finite(yMax, "yMax");
    if (!(xMin < xMax) || !(yMin < yMax)) throw std::invalid_argument("degenerate rectangle bounds");
    return Region{{Polygon{{xMin, yMin}, {xMax, yMin}, {xMax, yMax}, {xMin, yMax}}}};
}

Region region_square(Vec2 p, double h) {
    return region_from_rect(p.x - h, p.x + h, p.y - h, p.y + h);
}

Region region_from_sector(const SectorSpec& s) {
    require_finite(s.center.x, "sector center");
    require_finite(s.center.y, "sector center");
    require_finite(s.heading, "sector heading");
    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw std::invalid_argument("sector radius must be positive");
    if (!(s.angMin < s.angMax)) throw std::invalid_argument("sector requires angMin < angMax");
    if (s.arcSegments < 8) throw std::invalid_argument("sector arcSegments must be at least 8");
    const double twoPi = 2.0 * std::numbers::pi;
    const double span = s.angMax - s.angMin;
    if (span > twoPi + 1e-12) throw std::invalid_argument("sector span exceeds a full turn");

    auto arcPoint = [&](double ang) {
        return Vec2{s.center.x + s.radius * std::cos(ang), s.center.y + s.radius * std::sin(ang)};
    };
    const double start = s.heading + s.angMin;

    Region r;
    if (span >= twoPi - 1e-12) {
        Polygon p;
        for (int i = 0; i < s.arcSegments; ++i) p.push_back(arcPoint(start + twoPi * i / s.arcSegments));
        r.parts.push_back(std::move(p));
        return r;
    }
    const int pieces = static_cast<int>(std::ceil(span / std::numbers::pi - 1e-12));
    const int segs = std::max(2, (s.arcSegments + pieces - 1) / pieces);
    const double sub = span / pieces;
    for (int k = 0; k < pieces; ++k) {
        Polygon p{s.center};
        for (int i = 0; i <= segs; ++i) p.push_back(arcPoint(start + k * sub + sub * i / segs));
        if (tidy(p)) r.parts.push_back(std::move(p));
    }
    return r;
}

Region intersect(const Region& a, const Region& b) {
    Region out;
    std::vector<Box> bb;
    bb.reserve(b.parts.size());
    for (const Polygon& q : b.parts) bb.push_back(bounds(q));
    for (const Polygon& p : a.parts) {
        const Box pb = bounds(p);
        for (std::size_t j = 0; j < b.parts.size(); ++j) {
            if (!boxes_overlap(pb, bb[j])) continue;
            Polygon c = clip_convex(p, b.parts[j]);
            if (tidy(c)) out.parts.push_back(std::move(c));
        }
    }
    return out;
}

Region difference(const Region& a, const Region& b) {
    if (b.parts.empty()) return a;
    Region out;
    for (const Polygon& p : a.parts) {
        for (Polygon& piece : subtract_all(p, b.parts)) out.parts.push_back(std::move(piece));
    }
    return out;
}

// Only the part of b outside a is added, so disjoint inputs give a disjoint
// result and later intersections do not multiply overlapping pieces.
Region unite(const Region& a, const Region& b) {
    Region out = a;
    for (Polygon& piece : difference(b, a).parts) out.parts.push_back(std::move(piece));
    return out;
}

double area(const Region& a) {
    double total = 0.0;
    std::vector<Polygon> seen;
    for (const Polygon& p : a.parts) {
        for (const Polygon& piece : subtract_all(p, seen)) total += polygon_area(piece);
        seen.push_back(p);
    }
    return total;
}

bool is_empty(const Region& a, double areaTol) {
    return a.parts.empty() || area(a) <= areaTol;
}

bool is_subset(const Region& a, const Region& b, double areaTol) {
    if (areaTol < 0.0) throw std::invalid_argument("areaTol must be non-negative");
    if (a.parts.empty()) return true;
    return area(difference(a, b)) <= areaTol;
}

bool region_equal(const Region& a, const Region& b, double areaTol) {
    return is_subset(a, b, areaTol) && is_subset(b, a, areaTol);
}

bool contains_point(const Region& a, Vec2 p) {
    for (const Polygon& poly : a.parts) {
        bool inside = true;
        for (std::size_t i = 0; i < poly.size() && inside; ++i) {
            const Vec2 u = poly[i];
            const Vec2 d = poly[(i + 1) % poly.size()] - u;
            const double len = std::sqrt(dot(d, d));
            inside = cross(d, p - u) >= -1e-9 * len;
        }
        if (inside) return true;
    }
    return false;
}

void validate(const Region& r) {
    for (const Polygon& p : r.parts) {
        if (p.size() < 3) throw std::invalid_argument("region part has fewer than 3 vertices");
        for (const Vec2& v : p) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw std::invalid_argument("region vertex is not finite");
        }
        if (!(polygon_area(p) > 0.0)) throw std::invalid_argument("region part must be counter-clockwise with positive area");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2 a = p[i];
            const Vec2 b = p[(i + 1) % p.size()];
            const Vec2 c = p[(i + 2) % p.size()];
            if (cross(b - a, c - b) < -1e-9 * (1.0 + std::abs(polygon_area(p)))) {
                throw std::invalid_argument("region part is not convex");
            }
        }
    }
}

}  // namespace rids::geo
