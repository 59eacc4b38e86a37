#include "rids/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rids::scenarios {

namespace {

// (1 - exp(-k t)) / k, with its limit t at k = 0.
double decay_integral(double k, double t) {
    if (std::abs(k) < 1e-12) return t;
    return -std::expm1(-k * t) / k;
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(field) + " must be positive");
}

ProtocolSpec warehouse_with_gain(const WarehouseParams& p, double accScale) {
    validate(p);
    ProtocolSpec s;
    s.name = "warehouse";
    s.kappa = 1;
    s.lambdaCount = 0;
    s.stateNames = {"ACC", "DEC"};
    s.events = {
        DetectorCondition{{}, {0}, {}, {}},  // e1 = not s1
        DetectorCondition{{0}, {}, {}, {}},  // e2 = s1
    };
    s.transitions = {
        {{ACC, 0}, ACC},
        {{ACC, 1}, DEC},
        {{DEC, 0}, ACC},
        {{DEC, 1}, DEC},
    };
    s.initialState = DEC;

    const double d = p.d;
    const int segs = p.arcSegments;
    s.topologies = [d, segs](const AgentConfig& q) {
        geo::SectorSpec sec;
        sec.center = q.pos();
        sec.radius = d;
        sec.heading = q.theta;
        sec.angMin = -std::numbers::pi / 2;
        sec.angMax = std::numbers::pi / 4;
        sec.arcSegments = segs;
        return std::vector<geo::Region>{geo::region_from_sector(sec)};
    };
    s.lambda = [](int, const AgentConfig&, const Latch&) { return false; };

    const double accGain = p.mu * accScale;
    const double decGain = p.mu;
    const double vMax = p.vMax;
    s.decoder = [accGain, decGain, vMax](const AgentConfig& q, StateId sigma) {
        if (sigma == ACC) return Control{-accGain * (q.v - vMax), 0.0};
        return Control{-decGain * q.v, 0.0};
    };
    s.closedForm = [accGain, decGain, vMax](const AgentConfig& q, StateId sigma, double dt) {
        return warehouse_flow(q, sigma, dt, accGain, decGain, vMax);
    };
    const double R = p.R;
    s.visibility = [R, segs](const AgentConfig& own, const std::vector<AgentConfig>&) {
        geo::SectorSpec disc;
        disc.center = own.pos();
        disc.radius = R;
        disc.angMin = -std::numbers::pi;
        disc.angMax = std::numbers::pi;
        disc.arcSegments = segs;
        return geo::region_from_sector(disc);
    };
    return s;
}

// Andrew's monotone chain; returns a counter-clockwise hull.
geo::Polygon convex_hull(std::vector<geo::Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](geo::Vec2 a, geo::Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    geo::Polygon h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && geo::cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && geo::cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

std::vector<geo::Vec2> footprint(const AgentConfig& car, double length, double width) {
    const double c = std::cos(car.theta);
    const double sn = std::sin(car.theta);
    std::vector<geo::Vec2> out;
    for (double a : {-0.5, 0.5}) {
        for (double b : {-0.5, 0.5}) {
            const double lx = a * length;
            const double ly = b * width;
            out.push_back({car.x + lx * c - ly * sn, car.y + lx * sn + ly * c});
        }
    }
    return out;
}

geo::Region range_disc(geo::Vec2 c, double R, int segs) {
    geo::SectorSpec disc;
    disc.center = c;
    disc.radius = R;
    disc.angMin = -std::numbers::pi;
    disc.angMax = std::numbers::pi;
    disc.arcSegments = segs;
    return geo::region_from_sector(disc);
}

}  // namespace

void validate(const WarehouseParams& p) {
    require_positive(p.d, "d");
    require_positive(p.R, "R");
    require_positive(p.vMax, "vMax");
    require_positive(p.mu, "mu");
    require_positive(p.T, "T");
    if (!(p.R > p.d)) throw std::invalid_argument("R must exceed d");
    if (p.arcSegments < 8) throw std::invalid_argument("arcSegments must be at least 8");
}

ProtocolSpec build_warehouse(const WarehouseParams& p) { return warehouse_with_gain(p, 1.0); }

AgentConfig warehouse_flow(const AgentConfig& q, StateId sigma, double dt, double accGain, double decGain,
                           double vMax) {
    double delta = 0.0;
    double v = 0.0;
    if (sigma == ACC) {
        delta = vMax * dt + (q.v - vMax) * decay_integral(accGain, dt);
        v = vMax + (q.v - vMax) * std::exp(-accGain * dt);
    } else {
        delta = q.v * decay_integral(decGain, dt);
        v = q.v * std::exp(-decGain * dt);
    }
    return {q.x + delta * std::cos(q.theta), q.y + delta * std::sin(q.theta), q.theta, v};
}

void validate(const HighwayParams& p) {
    if (p.lanes < 2) throw std::invalid_argument("lanes must be at least 2");
    require_positive(p.laneWidth, "laneWidth");
    require_positive(p.dF, "dF");
    require_positive(p.dB, "dB");
    require_positive(p.aBar, "aBar");
    require_positive(p.omegaBar, "omegaBar");
    require_positive(p.thetaMax, "thetaMax");
    require_positive(p.mu, "mu");
    require_positive(p.R, "R");
    require_positive(p.carLength, "carLength");
    require_positive(p.carWidth, "carWidth");
    for (double v : p.vMaxPerAgent) require_positive(v, "vMaxPerAgent");
    if (p.arcSegments < 8) throw std::invalid_argument("arcSegments must be at least 8");
}

int lane_of(double y, double laneWidth) { return static_cast<int>(std::floor(y / laneWidth)); }

double sinc(double theta) {
    if (std::abs(theta) < 1e-4) {
        const double t2 = theta * theta;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(theta) / theta;
}

double centering_rate(double yStar, double y, double theta, double v, double mu) {
    return ((yStar - y) * sinc(theta) - mu * theta) * v;
}

ProtocolSpec build_highway(const HighwayParams& p, double vMax) {
    validate(p);
    require_positive(vMax, "vMax");
    ProtocolSpec s;
    s.name = "highway";
    s.kappa = 4;
    s.lambdaCount = 4;
    s.stateNames = {"FAST", "SLOW", "LEFT", "RIGHT"};
    // Bits: 0 front, 1 left, 2 right, 3 back. Lambdas: 0 left-most lane,
    // 1 right-most lane, 2 left edge of target lane, 3 right edge of target lane.
    s.events = {
        DetectorCondition{{2}, {0}, {}, {}},          // e1  = !s1 s3
        DetectorCondition{{}, {0}, {1}, {}},          // e2  = !s1 l2
        DetectorCondition{{0, 1}, {}, {}, {}},        // e3  = s1 s2
        DetectorCondition{{0, 3}, {}, {}, {}},        // e4  = s1 s4
        DetectorCondition{{0}, {}, {0}, {}},          // e5  = s1 l1
        DetectorCondition{{0}, {1, 3}, {}, {0}},      // e6  = s1 !s2 !s4 !l1
        DetectorCondition{{}, {0, 2}, {}, {1}},       // e7  = !s1 !s3 !l2
        DetectorCondition{{}, {0}, {}, {}},           // e8  = !s1
        DetectorCondition{{}, {}, {2}, {}},           // e9  = l3
        DetectorCondition{{0}, {}, {}, {2}},          // e10 = s1 !l3
        DetectorCondition{{0}, {}, {}, {}},           // e11 = s1
        DetectorCondition{{}, {}, {3}, {}},           // e12 = l4
        DetectorCondition{{}, {0}, {}, {3}},          // e13 = !s1 !l4
    };
    s.transitions = {
        {{FAST, 0}, FAST},  {{FAST, 1}, FAST},  {{FAST, 2}, SLOW},   {{FAST, 3}, SLOW},  {{FAST, 4}, SLOW},
        {{FAST, 5}, LEFT},  {{FAST, 6}, RIGHT}, {{SLOW, 7}, FAST},   {{SLOW, 2}, SLOW},  {{SLOW, 3}, SLOW},
        {{SLOW, 4}, SLOW},  {{SLOW, 5}, LEFT},  {{LEFT, 7}, FAST},   {{LEFT, 8}, FAST},  {{LEFT, 9}, LEFT},
        {{RIGHT, 10}, FAST}, {{RIGHT, 11}, FAST}, {{RIGHT, 12}, RIGHT},
    };
    s.initialState = FAST;

    const double w = p.laneWidth;
    const double dF = p.dF;
    const double dB = p.dB;
    s.topologies = [w, dF, dB](const AgentConfig& q) {
        const double base = lane_of(q.y, w) * w;
        return std::vector<geo::Region>{
            geo::region_from_rect(q.x, q.x + dF, base, base + w),
            geo::region_from_rect(q.x - dB, q.x + dF, base + w, base + 2 * w),
            geo::region_from_rect(q.x - dB, q.x + dF, base - w, base),
            geo::region_from_rect(q.x - dB, q.x, base, base + w),
        };
    };

    const int m = p.lanes;
    s.lambda = [w, m](int k, const AgentConfig& q, const Latch& latch) {
        switch (k) {
            case 0: return (m - 1) * w <= q.y && q.y <= m * w;
            case 1: return 0.0 <= q.y && q.y <= w;
            case 2:
                return latch.anchor.has_value() && (!latch.mode || *latch.mode == LEFT) &&
                       q.y >= (*latch.anchor + 1) * w;
            case 3:
                return latch.anchor.has_value() && (!latch.mode || *latch.mode == RIGHT) && q.y <= *latch.anchor * w;
            default: throw std::out_of_range("highway lambda index");
        }
    };
    s.latchUpdate = [w](const Latch& prev, StateId from, StateId to, const AgentConfig& q) {
        if (to != LEFT && to != RIGHT) return Latch{};
        if (from == to) return prev;
        return Latch{lane_of(q.y, w), to};
    };
    s.monitorLatch = [w](const AgentConfig& prev) { return Latch{lane_of(prev.y, w), std::nullopt}; };

    const double aBar = p.aBar;
    const double omegaBar = p.omegaBar;
    const double thetaMax = p.thetaMax;
    const double mu = p.mu;
    s.decoder = [=](const AgentConfig& q, StateId sigma) {
        Control u;
        switch (sigma) {
            case FAST:
            case SLOW: {
                const double yStar = (lane_of(q.y, w) + 0.5) * w;
                u.omega = centering_rate(yStar, q.y, q.theta, q.v, mu);
                if (sigma == FAST) {
                    u.a = q.v < vMax ? aBar : 0.0;
                } else {
                    u.a = q.v > 0.0 ? -aBar : 0.0;
                }
                break;
            }
            case LEFT:
                u.a = q.v < vMax ? aBar : 0.0;
                u.omega = q.theta < thetaMax ? omegaBar : 0.0;
                break;
            case RIGHT:
                u.a = 0.0;
                u.omega = q.theta > -thetaMax ? -omegaBar : 0.0;
                break;
            default: throw std::out_of_range("highway state");
        }
        return u;
    };

    const double R = p.R;
    const int segs = p.arcSegments;
    const bool occlusion = p.occlusion;
    const double len = p.carLength;
    const double wid = p.carWidth;
    s.visibility = [=](const AgentConfig& own, const std::vector<AgentConfig>& others) {
        geo::Region v = range_disc(own.pos(), R, segs);
        if (!occlusion) return v;
        geo::Region shadows;
        for (const AgentConfig& o : others) shadows = geo::unite(shadows, car_shadow(own.pos(), o, len, wid, R));
        return geo::difference(v, shadows);
    };
    return s;
}

ProtocolSpec build_highway(const HighwayParams& p, std::size_t agentIndex) {
    if (agentIndex >= p.vMaxPerAgent.size()) throw std::out_of_range("no vMax for highway agent");
    return build_highway(p, p.vMaxPerAgent[agentIndex]);
}

geo::Region car_shadow(geo::Vec2 observer, const AgentConfig& car, double length, double width, double R) {
    const std::vector<geo::Vec2> corners = footprint(car, length, width);
    const geo::Vec2 dir = car.pos() - observer;
    const double base = std::atan2(dir.y, dir.x);
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const geo::Vec2& c : corners) {
        const geo::Vec2 r = c - observer;
        const double psi = std::atan2(geo::cross(dir, r), geo::dot(dir, r));
        lo = first ? psi : std::min(lo, psi);
        hi = first ? psi : std::max(hi, psi);
        first = false;
    }
    // Observer inside or touching the footprint: everything may be hidden.
    if (geo::dot(dir, dir) < 1e-12 || hi - lo >= std::numbers::pi - 1e-6) return range_disc(observer, 2.0 * R, 16);

    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / (std::numbers::pi / 4))));
    const double step = (hi - lo) / steps;
    const double far = R / std::cos(step / 2) * (1.0 + 1e-6) + 1.0;
    std::vector<geo::Vec2> pts = corners;
    for (int i = 0; i <= steps; ++i) {
        const double a = base + lo + step * i;
        pts.push_back({observer.x + far * std::cos(a), observer.y + far * std::sin(a)});
    }
    return geo::Region{{convex_hull(std::move(pts))}};
}

bool car_visible(const HighwayParams& p, const AgentConfig& observer, const AgentConfig& target,
                 const std::vector<AgentConfig>& others) {
    const geo::Region disc = range_disc(observer.pos(), p.R, p.arcSegments);
    if (!geo::contains_point(disc, target.pos())) return false;
    if (!p.occlusion) return true;
    for (const AgentConfig& o : others) {
        if (geo::contains_point(car_shadow(observer.pos(), o, p.carLength, p.carWidth, p.R), target.pos())) {
            return false;
        }
    }
    return true;
}

Behavior corrupted_encoder(GhostSchedule ghost) { return CorruptedEncoder{std::move(ghost)}; }

Behavior corrupted_decoder(const WarehouseParams& p, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    return CorruptedDecoder{alpha, std::make_shared<const ProtocolSpec>(warehouse_with_gain(p, 1.0 - alpha))};
}

EpsilonBound epsilon_bound(double alpha, double vTk, const WarehouseParams& p) {
    const double gap = p.mu * std::abs(vTk - p.vMax) * p.T * alpha;
    return {gap, -gap + p.mu * p.T * p.vMax};
}

}  // namespace rids::scenarios
