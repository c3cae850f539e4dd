#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "v2xsim/config.hpp"
#include "v2xsim/geometry.hpp"
#include "v2xsim/mobility.hpp"

namespace v2xsim {

struct Cluster {
    std::vector<int> members; ///< vehicle ids, ascending, seed included
    Vec2 centroid;
    int seed_id = 0; ///< vehicle that opened the cluster; SR/PL reference
};

struct DbsStation {
    int id = 0; ///< station id; 0 is reserved for the MBS
    Vec3 position;
    double power_budget_w = 0.0;
};

enum class ClusterMode {
    proposed,    ///< coverage + speed + prediction filters, guarded expansion
    plain_dbscan ///< textbook epsilon/MinPoints DBSCAN, no extra filters
};

struct ClusteringResult {
    std::vector<Cluster> clusters;
    std::vector<int> unclustered; ///< vehicle ids served by the MBS, ascending
};

namespace detail {

class VehicleIndex {
  public:
    explicit VehicleIndex(const std::vector<Vehicle>& vehicles) : vehicles_(vehicles) {
        for (std::size_t i = 0; i < vehicles.size(); ++i)
            by_id_[vehicles[i].id] = i;
    }
    const Vehicle& at(int id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end())
            throw std::invalid_argument("unknown vehicle id " + std::to_string(id));
        return vehicles_[it->second];
    }
    bool contains(int id) const { return by_id_.count(id) > 0; }

  private:
    const std::vector<Vehicle>& vehicles_;
    std::unordered_map<int, std::size_t> by_id_;
};

} // namespace detail

/// All vehicles other than i within planar distance epsilon of i.
inline std::vector<int> neighbors(int i, const std::vector<Vehicle>& vehicles,
                                  double epsilon_m) {
    detail::VehicleIndex index(vehicles);
    const Vehicle& vi = index.at(i);
    std::vector<int> out;
    for (const Vehicle& v : vehicles) {
        if (v.id == i)
            continue;
        if (planar_distance(v.position, vi.position) <= epsilon_m)
            out.push_back(v.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Arithmetic mean of member positions.
inline Vec2 centroid(const std::vector<int>& member_ids,
                     const std::vector<Vehicle>& vehicles) {
    if (member_ids.empty())
        throw std::invalid_argument("centroid: empty member set");
    detail::VehicleIndex index(vehicles);
    Vec2 sum;
    for (int id : member_ids)
        sum = sum + index.at(id).position;
    const double n = static_cast<double>(member_ids.size());
    return {sum.x / n, sum.y / n};
}

/// One pass of the neighborhood filter: drop candidates farther than r_k
/// from the pre-filter centroid (seed plus candidates), or dissimilar in
/// speed / predicted region relative to the seed.
inline std::vector<int> filter_neighbors(int i, const std::vector<int>& candidates,
                                         const std::vector<Vehicle>& vehicles,
                                         const ScenarioConfig& cfg) {
    detail::VehicleIndex index(vehicles);
    const Vehicle& seed = index.at(i);
    std::vector<int> pre = candidates;
    pre.push_back(i);
    const Vec2 center = centroid(pre, vehicles);
    std::vector<int> kept;
    for (int id : candidates) {
        const Vehicle& v = index.at(id);
        if (planar_distance(v.position, center) > cfg.r_k)
            continue;
        if (!speed_similar(seed, v, cfg.theta_kmh))
            continue;
        if (!same_predicted_region(seed, v, cfg))
            continue;
        kept.push_back(id);
    }
    return kept;
}

namespace detail {

inline std::vector<int> masked_neighbors(const Vehicle& vi,
                                         const std::vector<Vehicle>& vehicles,
                                         double epsilon_m,
                                         const std::unordered_set<int>& assigned) {
    std::vector<int> out;
    for (const Vehicle& v : vehicles) {
        if (v.id == vi.id || assigned.count(v.id))
            continue;
        if (planar_distance(v.position, vi.position) <= epsilon_m)
            out.push_back(v.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Vec2 mean_position(const std::vector<int>& ids, const VehicleIndex& index) {
    Vec2 sum;
    for (int id : ids)
        sum = sum + index.at(id).position;
    const double n = static_cast<double>(ids.size());
    return {sum.x / n, sum.y / n};
}

// Grows one proposed-mode cluster from seed_id. Returns false if the cluster
// dissolves below the minimum size during radius stabilization.
inline bool grow_proposed_cluster(int seed_id, const std::vector<int>& filtered,
                                  const std::vector<Vehicle>& vehicles,
                                  const VehicleIndex& index,
                                  const ScenarioConfig& cfg,
                                  std::unordered_set<int>& assigned,
                                  Cluster& out) {
    const Vehicle& seed = index.at(seed_id);
    std::vector<int> members = filtered;
    members.push_back(seed_id);
    std::sort(members.begin(), members.end());
    for (int id : members)
        assigned.insert(id);

    auto erase_member = [&](int id) {
        members.erase(std::find(members.begin(), members.end(), id));
        assigned.erase(id);
    };

    // Expansion: each member contributes its own epsilon-neighborhood. A
    // candidate is admitted only if, after recomputing the centroid with it
    // included, at most one existing member falls outside r_k; that member
    // is then evicted back to the unassigned pool.
    std::deque<int> queue(filtered.begin(), filtered.end());
    while (!queue.empty()) {
        const int m = queue.front();
        queue.pop_front();
        if (std::find(members.begin(), members.end(), m) == members.end())
            continue; // evicted before its turn
        for (int c : masked_neighbors(index.at(m), vehicles, cfg.epsilon_m, assigned)) {
            const Vehicle& cand = index.at(c);
            std::vector<int> tentative = members;
            tentative.push_back(c);
            const Vec2 center = mean_position(tentative, index);
            if (planar_distance(cand.position, center) > cfg.r_k)
                continue;
            if (!speed_similar(seed, cand, cfg.theta_kmh))
                continue;
            if (!same_predicted_region(seed, cand, cfg))
                continue;
            if (planar_distance(seed.position, center) > cfg.r_k)
                continue; // the seed itself cannot be evicted
            std::vector<int> fails;
            for (int id : members) {
                if (id == seed_id)
                    continue;
                if (planar_distance(index.at(id).position, center) > cfg.r_k)
                    fails.push_back(id);
            }
            if (fails.size() >= 2)
                continue;
            if (fails.size() == 1)
                erase_member(fails.front());
            members.push_back(c);
            std::sort(members.begin(), members.end());
            assigned.insert(c);
            queue.push_back(c);
        }
    }

    // Radius stabilization: the emitted centroid is the mean of the final
    // member set, which can drift from the centroid the filter pass used.
    // Evict until every member sits within r_k of the emitted centroid.
    for (;;) {
        const Vec2 center = mean_position(members, index);
        int worst = -1;
        double worst_d = cfg.r_k;
        bool seed_violates = planar_distance(seed.position, center) > cfg.r_k;
        for (int id : members) {
            if (id == seed_id)
                continue;
            const double d = planar_distance(index.at(id).position, center);
            if (d > worst_d) {
                worst_d = d;
                worst = id;
            }
        }
        if (worst < 0 && !seed_violates) {
            out.members = members;
            out.centroid = center;
            out.seed_id = seed_id;
            return true;
        }
        if (worst < 0) {
            // only the seed violates: shed the farthest other member
            double far_d = -1.0;
            for (int id : members) {
                if (id == seed_id)
                    continue;
                const double d = planar_distance(index.at(id).position, center);
                if (d > far_d) {
                    far_d = d;
                    worst = id;
                }
            }
        }
        erase_member(worst);
        if (static_cast<int>(members.size()) < cfg.min_points + 1) {
            for (int id : members)
                assigned.erase(id);
            return false;
        }
    }
}

inline bool grow_plain_cluster(int seed_id, const std::vector<int>& ngb,
                               const std::vector<Vehicle>& vehicles,
                               const VehicleIndex& index, const ScenarioConfig& cfg,
                               std::unordered_set<int>& assigned, Cluster& out) {
    std::vector<int> members = ngb;
    members.push_back(seed_id);
    std::sort(members.begin(), members.end());
    for (int id : members)
        assigned.insert(id);

    std::deque<int> queue(ngb.begin(), ngb.end());
    while (!queue.empty()) {
        const int m = queue.front();
        queue.pop_front();
        // expansion only through core members
        if (static_cast<int>(neighbors(m, vehicles, cfg.epsilon_m).size()) < cfg.min_points)
            continue;
        for (int c : masked_neighbors(index.at(m), vehicles, cfg.epsilon_m, assigned)) {
            members.push_back(c);
            assigned.insert(c);
            queue.push_back(c);
        }
        std::sort(members.begin(), members.end());
    }
    out.members = members;
    out.centroid = mean_position(members, index);
    out.seed_id = seed_id;
    return true;
}

} // namespace detail

/// Runs the clustering pass over all vehicles in ascending id order and
/// reports the clusters plus the MBS-served remainder.
inline ClusteringResult form_clusters(const std::vector<Vehicle>& vehicles,
                                      const ScenarioConfig& cfg,
                                      ClusterMode mode = ClusterMode::proposed) {
    detail::VehicleIndex index(vehicles);
    std::vector<int> order;
    order.reserve(vehicles.size());
    for (const Vehicle& v : vehicles)
        order.push_back(v.id);
    std::sort(order.begin(), order.end());

    std::unordered_set<int> assigned;
    ClusteringResult result;
    for (int i : order) {
        if (assigned.count(i))
            continue;
        const std::vector<int> ngb =
            detail::masked_neighbors(index.at(i), vehicles, cfg.epsilon_m, assigned);
        Cluster cluster;
        bool formed = false;
        if (mode == ClusterMode::proposed) {
            std::vector<int> filtered = filter_neighbors(i, ngb, vehicles, cfg);
            if (static_cast<int>(filtered.size()) >= cfg.min_points)
                formed = detail::grow_proposed_cluster(i, filtered, vehicles, index,
                                                       cfg, assigned, cluster);
        } else {
            if (static_cast<int>(ngb.size()) >= cfg.min_points)
                formed = detail::grow_plain_cluster(i, ngb, vehicles, index, cfg,
                                                    assigned, cluster);
        }
        if (formed)
            result.clusters.push_back(std::move(cluster));
    }
    for (int i : order)
        if (!assigned.count(i))
            result.unclustered.push_back(i);
    return result;
}

/// One DBS per cluster, hovering over the centroid.
inline std::vector<DbsStation> place_dbs(const std::vector<Cluster>& clusters,
                                         const ScenarioConfig& cfg) {
    std::vector<DbsStation> out;
    out.reserve(clusters.size());
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        DbsStation s;
        s.id = static_cast<int>(k) + 1;
        s.position = {clusters[k].centroid.x, clusters[k].centroid.y, cfg.dbs_altitude_m};
        s.power_budget_w = cfg.p_k_max;
        out.push_back(s);
    }
    return out;
}

} // namespace v2xsim
