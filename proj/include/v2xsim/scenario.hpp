#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "v2xsim/allocation.hpp"
#include "v2xsim/clustering.hpp"
#include "v2xsim/config.hpp"
#include "v2xsim/mobility.hpp"
#include "v2xsim/radio.hpp"
#include "v2xsim/rng.hpp"
#include "v2xsim/state.hpp"

namespace v2xsim {

enum class Method {
    proposed,     ///< filtered clustering + DBS + NOMA
    plain_dbscan, ///< unfiltered epsilon/MinPoints clustering + DBS + NOMA
    mbs_only      ///< no clusters; every vehicle served by the MBS
};

inline const char* method_label(Method m) {
    switch (m) {
    case Method::proposed: return "proposed";
    case Method::plain_dbscan: return "plain_dbscan";
    case Method::mbs_only: return "mbs_only";
    }
    return "?";
}

struct ScenarioOutcome {
    double total_se = 0.0;
    std::map<int, double> per_user_se;
    int num_clusters = 0;
};

/// MBS antenna: arena center, 25 m mast. Receivers are at ground level.
inline Vec3 mbs_antenna_position(const ScenarioConfig& cfg) {
    return {cfg.arena_side_m / 2.0, cfg.arena_side_m / 2.0, 25.0};
}

/// Path gains from every station to the users it serves.
inline std::vector<LinkGain> compute_link_gains(const ScenarioState& state,
                                                const ScenarioConfig& cfg) {
    detail::VehicleIndex index(state.vehicles);
    std::vector<LinkGain> out;
    auto add = [&](int station_id, const Vec3& station_pos, int user_id) {
        const Vehicle& v = index.at(user_id);
        const Vec3 user_pos{v.position.x, v.position.y, 0.0};
        LinkGain lg;
        lg.station_id = station_id;
        lg.user_id = user_id;
        lg.gain = path_gain(distance_m(station_pos, user_pos), cfg.fc_ghz);
        out.push_back(lg);
    };
    for (int u : state.mbs_users)
        add(0, state.mbs_position, u);
    for (std::size_t k = 0; k < state.clusters.size(); ++k)
        for (int u : state.clusters[k].members)
            add(state.dbs_list[k].id, state.dbs_list[k].position, u);
    return out;
}

/// Builds the scenario snapshot for one (config, seed, method) triple:
/// spawn, optional mobility warm-up, clustering, DBS placement.
inline ScenarioState make_scenario_state(const ScenarioConfig& cfg, std::uint64_t seed,
                                         Method method = Method::proposed,
                                         int warmup_steps = 0, double dt_s = 1.0) {
    RngStream mobility_rng = make_rng(seed, "mobility");
    ScenarioState state;
    state.vehicles = spawn_vehicles(cfg, mobility_rng);
    for (int s = 0; s < warmup_steps; ++s)
        for (Vehicle& v : state.vehicles)
            v = step(v, dt_s, cfg, mobility_rng);
    state.time_s = warmup_steps * dt_s;
    state.mbs_position = mbs_antenna_position(cfg);

    if (method == Method::mbs_only) {
        for (const Vehicle& v : state.vehicles)
            state.mbs_users.push_back(v.id);
        std::sort(state.mbs_users.begin(), state.mbs_users.end());
        return state;
    }
    const ClusterMode mode = method == Method::proposed ? ClusterMode::proposed
                                                        : ClusterMode::plain_dbscan;
    ClusteringResult clustering = form_clusters(state.vehicles, cfg, mode);
    state.clusters = std::move(clustering.clusters);
    state.mbs_users = std::move(clustering.unclustered);
    state.dbs_list = place_dbs(state.clusters, cfg);
    return state;
}

/// One deterministic end-to-end run: spawn -> cluster -> place -> allocate.
inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg, std::uint64_t seed,
                                    Method method = Method::proposed,
                                    int warmup_steps = 0) {
    ScenarioOutcome outcome;
    const ScenarioState state = make_scenario_state(cfg, seed, method, warmup_steps);
    outcome.num_clusters = static_cast<int>(state.clusters.size());
    if (state.vehicles.empty())
        return outcome;
    const AllocationPlan plan = build_plan(state, compute_link_gains(state, cfg), cfg);
    outcome.total_se = plan.total_se;
    outcome.per_user_se = plan.per_user_se;
    return outcome;
}

} // namespace v2xsim
