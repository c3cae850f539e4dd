#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "v2xsim/config.hpp"
#include "v2xsim/geometry.hpp"
#include "v2xsim/rng.hpp"

namespace v2xsim {

struct Vehicle {
    int id = 0;
    Vec2 position;
    Vec2 destination;
    double speed_kmh = 0.0;
    Vec2 heading; ///< unit vector from position toward destination
};

inline double kmh_to_mps(double kmh) { return kmh * (1000.0 / 3600.0); }

namespace detail {

inline Vec2 draw_point(const ScenarioConfig& cfg, RngStream& rng) {
    const double x = rng.uniform(0.0, cfg.arena_side_m);
    const double y = rng.uniform(0.0, cfg.arena_side_m);
    return {x, y};
}

inline Vec2 draw_destination(const ScenarioConfig& cfg, RngStream& rng, Vec2 from) {
    Vec2 d = draw_point(cfg, rng);
    while (d == from)
        d = draw_point(cfg, rng);
    return d;
}

} // namespace detail

/// Vehicles start at uniform positions with uniform destinations and speeds.
inline std::vector<Vehicle> spawn_vehicles(const ScenarioConfig& cfg, RngStream& rng) {
    std::vector<Vehicle> out;
    out.reserve(static_cast<std::size_t>(cfg.num_vehicles));
    for (int i = 0; i < cfg.num_vehicles; ++i) {
        Vehicle v;
        v.id = i;
        v.position = detail::draw_point(cfg, rng);
        v.destination = detail::draw_destination(cfg, rng, v.position);
        v.speed_kmh = rng.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh);
        v.heading = normalized(v.destination - v.position);
        out.push_back(v);
    }
    return out;
}

/// Advances one vehicle by dt seconds. On reaching its destination the
/// vehicle draws a fresh destination and speed and spends the remaining
/// travel distance of this step toward it.
inline Vehicle step(Vehicle v, double dt_s, const ScenarioConfig& cfg, RngStream& rng) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("step: dt_s must be positive");
    double remaining_m = kmh_to_mps(v.speed_kmh) * dt_s;
    for (;;) {
        const double to_dest = planar_distance(v.position, v.destination);
        if (remaining_m < to_dest) {
            v.position = v.position + v.heading * remaining_m;
            return v;
        }
        v.position = v.destination;
        remaining_m -= to_dest;
        v.destination = detail::draw_destination(cfg, rng, v.position);
        v.speed_kmh = rng.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh);
        v.heading = normalized(v.destination - v.position);
    }
}

/// Dead-reckoning position estimate, truncated at the destination.
inline Vec2 predict_location(const Vehicle& v, double horizon_s) {
    if (horizon_s < 0.0)
        throw std::invalid_argument("predict_location: horizon_s must be nonnegative");
    const double travel_m = kmh_to_mps(v.speed_kmh) * horizon_s;
    const double to_dest = planar_distance(v.position, v.destination);
    if (travel_m >= to_dest)
        return v.destination;
    return v.position + v.heading * travel_m;
}

/// SR(i,j): strict speed-difference window.
inline bool speed_similar(const Vehicle& a, const Vehicle& b, double theta_kmh) {
    return std::abs(a.speed_kmh - b.speed_kmh) < theta_kmh;
}

/// PL(i,j): predicted locations fall in the same square grid cell.
inline bool same_predicted_region(const Vehicle& a, const Vehicle& b,
                                  const ScenarioConfig& cfg) {
    const Vec2 pa = predict_location(a, cfg.prediction_horizon_s);
    const Vec2 pb = predict_location(b, cfg.prediction_horizon_s);
    auto cell = [&](double coord) {
        return static_cast<long long>(std::floor(coord / cfg.prediction_cell_m));
    };
    return cell(pa.x) == cell(pb.x) && cell(pa.y) == cell(pb.y);
}

} // namespace v2xsim
