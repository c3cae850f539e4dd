#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "v2xsim/config.hpp"
#include "v2xsim/radio.hpp"
#include "v2xsim/state.hpp"

namespace v2xsim {

/// NOMA group: an ordered (near, far) pair or an OMA singleton.
struct NomaGroup {
    int station_id = 0;
    int near_user = 0;
    std::optional<int> far_user;
    std::optional<int> channel;

    bool is_pair() const { return far_user.has_value(); }
};

struct AllocationPlan {
    std::vector<NomaGroup> groups; ///< all groups with channels set
    std::map<std::tuple<int, int, int>, double> powers; ///< (station,user,channel) -> W
    std::map<int, double> per_user_se; ///< user -> bit/s/Hz (0 for unserved)
    double total_se = 0.0;
};

struct InsufficientChannelsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sorts users by descending gain (ties by ascending id) and pairs rank r
/// with rank r + ceil(n/2); an odd middle rank is served as an OMA singleton.
inline std::vector<NomaGroup> pair_users(const std::vector<int>& user_ids,
                                         const std::map<int, double>& gains,
                                         int station_id) {
    std::vector<int> sorted = user_ids;
    for (int id : sorted)
        if (!gains.count(id))
            throw std::invalid_argument("pair_users: no gain for user " + std::to_string(id));
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        const double ga = gains.at(a), gb = gains.at(b);
        if (ga != gb)
            return ga > gb;
        return a < b;
    });
    const int n = static_cast<int>(sorted.size());
    const int half = (n + 1) / 2;
    std::vector<NomaGroup> groups;
    for (int r = 0; r < n - half; ++r) {
        NomaGroup g;
        g.station_id = station_id;
        g.near_user = sorted[r];
        g.far_user = sorted[r + half];
        groups.push_back(g);
    }
    if (n % 2 == 1) {
        NomaGroup g;
        g.station_id = station_id;
        g.near_user = sorted[half - 1];
        groups.push_back(g);
    }
    return groups;
}

namespace detail {

/// Hands out channels 0,1,2,... in station order; each station gets exactly
/// its group count. counts[s] is the demand of station ids[s].
inline std::map<int, std::vector<int>>
partition_by_counts(int num_channels, const std::vector<std::pair<int, int>>& station_counts) {
    int demand = 0;
    for (const auto& [id, count] : station_counts)
        demand += count;
    if (demand > num_channels) {
        std::ostringstream os;
        os << "insufficient channels: demanded " << demand << ", available "
           << num_channels;
        throw InsufficientChannelsError(os.str());
    }
    std::map<int, std::vector<int>> out;
    int next = 0;
    for (const auto& [id, count] : station_counts) {
        std::vector<int>& set = out[id];
        for (int c = 0; c < count; ++c)
            set.push_back(next++);
    }
    return out;
}

} // namespace detail

/// Disjoint channel sets, MBS (station 0) first, then clusters in id order.
/// A cluster with m members demands ceil(m/2) channels.
inline std::map<int, std::vector<int>> partition_channels(int num_channels,
                                                          const std::vector<Cluster>& clusters,
                                                          int mbs_group_count) {
    std::vector<std::pair<int, int>> counts;
    counts.emplace_back(0, mbs_group_count);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const int m = static_cast<int>(clusters[k].members.size());
        counts.emplace_back(static_cast<int>(k) + 1, (m + 1) / 2);
    }
    return detail::partition_by_counts(num_channels, counts);
}

/// Rows are groups, columns are channels; the cost of a cell is the negative
/// total member gain (gains are channel-independent, so rows are constant).
inline std::vector<std::vector<double>>
build_cost_matrix(const std::vector<NomaGroup>& groups, const std::vector<int>& channel_set,
                  const std::map<int, double>& gains) {
    std::vector<std::vector<double>> cost(groups.size(),
                                          std::vector<double>(channel_set.size(), 0.0));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double total = gains.at(groups[g].near_user);
        if (groups[g].far_user)
            total += gains.at(*groups[g].far_user);
        for (std::size_t n = 0; n < channel_set.size(); ++n)
            cost[g][n] = -total;
    }
    return cost;
}

struct HungarianResult {
    std::vector<int> row_to_col;
    double total_cost = 0.0;
};

/// Minimum-cost injective assignment of rows to columns (rows <= columns),
/// Jonker-Volgenant style shortest augmenting paths, O(n^2 m).
inline HungarianResult hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    HungarianResult result;
    if (n == 0)
        return result;
    const int m = static_cast<int>(cost[0].size());
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("hungarian: ragged cost matrix");
    if (n > m)
        throw std::invalid_argument("hungarian: more rows than columns");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0); // match[j]: row in column j, 1-based

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j])
                    continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    result.row_to_col.assign(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] != 0)
            result.row_to_col[match[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i)
        result.total_cost += cost[i][result.row_to_col[i]];
    return result;
}

/// Equal power share per group; within a pair the far user takes alpha_f
/// of the share and the near user alpha_n. Singletons take the full share.
inline std::map<int, double> allocate_power(const std::vector<NomaGroup>& station_groups,
                                            double station_budget_w, double alpha_f,
                                            double alpha_n) {
    if (station_groups.empty())
        throw std::invalid_argument("allocate_power: station has no groups");
    const double share = station_budget_w / static_cast<double>(station_groups.size());
    std::map<int, double> powers;
    for (const NomaGroup& g : station_groups) {
        if (g.is_pair()) {
            powers[g.near_user] = alpha_n * share;
            powers[*g.far_user] = alpha_f * share;
        } else {
            powers[g.near_user] = share;
        }
    }
    return powers;
}

/// SIC feasibility check for one pair under the given powers.
inline bool check_sic(const NomaGroup& group, const std::map<int, double>& powers,
                      const std::map<int, double>& gains, double sigma2_w, double p_tol) {
    if (!group.is_pair())
        throw std::invalid_argument("check_sic: group is not a pair");
    const double margin =
        sic_margin(powers.at(group.near_user), gains.at(group.near_user),
                   powers.at(*group.far_user), gains.at(*group.far_user), sigma2_w);
    return margin >= p_tol;
}

namespace detail {

inline double group_se(const NomaGroup& g, const std::map<int, double>& powers,
                       const std::map<int, double>& gains, double sigma2_w,
                       std::map<int, double>* per_user) {
    double sum = 0.0;
    if (g.is_pair()) {
        const double near = se_near(powers.at(g.near_user), gains.at(g.near_user), sigma2_w);
        const double far = se_far(powers.at(*g.far_user), gains.at(*g.far_user),
                                  powers.at(g.near_user), sigma2_w);
        if (per_user) {
            (*per_user)[g.near_user] = near;
            (*per_user)[*g.far_user] = far;
        }
        sum = near + far;
    } else {
        const double oma = se_oma(powers.at(g.near_user), gains.at(g.near_user), sigma2_w);
        if (per_user)
            (*per_user)[g.near_user] = oma;
        sum = oma;
    }
    return sum;
}

} // namespace detail

/// Sum of per-group spectral efficiencies over all assigned groups.
/// gains maps (station,user) via per-station maps keyed by station id.
inline double total_spectral_efficiency(const AllocationPlan& plan,
                                        const std::map<int, std::map<int, double>>& gains,
                                        double sigma2_w) {
    double total = 0.0;
    for (const NomaGroup& g : plan.groups) {
        if (!g.channel)
            continue;
        std::map<int, double> powers;
        powers[g.near_user] = plan.powers.at({g.station_id, g.near_user, *g.channel});
        if (g.far_user)
            powers[*g.far_user] = plan.powers.at({g.station_id, *g.far_user, *g.channel});
        total += detail::group_se(g, powers, gains.at(g.station_id), sigma2_w, nullptr);
    }
    return total;
}

/// Full allocation pipeline for one scenario snapshot: pairing, channel
/// partition, per-station Hungarian assignment, equal-share power split, and
/// SIC verification with demotion of infeasible pairs.
inline AllocationPlan build_plan(const ScenarioState& state,
                                 const std::vector<LinkGain>& link_gains,
                                 const ScenarioConfig& cfg) {
    const double sigma2 = noise_power_w(cfg.n0_dbm_hz, cfg.channel_bandwidth_hz);

    std::map<int, std::map<int, double>> gains; // station -> user -> h
    for (const LinkGain& lg : link_gains)
        gains[lg.station_id][lg.user_id] = lg.gain;

    // users per station, station 0 = MBS, then clusters in id order
    std::vector<std::pair<int, std::vector<int>>> station_users;
    station_users.emplace_back(0, state.mbs_users);
    for (std::size_t k = 0; k < state.clusters.size(); ++k)
        station_users.emplace_back(static_cast<int>(k) + 1, state.clusters[k].members);

    auto station_budget = [&](int sid) { return sid == 0 ? cfg.p_b_max : cfg.p_k_max; };

    std::map<int, std::vector<NomaGroup>> groups_by_station;
    std::vector<std::pair<int, int>> counts;
    for (const auto& [sid, users] : station_users) {
        if (users.empty())
            continue;
        groups_by_station[sid] = pair_users(users, gains.at(sid), sid);
        counts.emplace_back(sid, static_cast<int>(groups_by_station[sid].size()));
    }

    const auto channel_sets = detail::partition_by_counts(cfg.num_channels, counts);
    std::set<int> leftover;
    {
        int assigned_total = 0;
        for (const auto& [sid, count] : counts)
            assigned_total += count;
        for (int c = assigned_total; c < cfg.num_channels; ++c)
            leftover.insert(c);
    }

    // Channel assignment per station. Gains are channel-independent, so every
    // injective assignment is Hungarian-optimal; when the canonical ascending
    // assignment ties the solver's total, it is preferred for determinism.
    for (auto& [sid, groups] : groups_by_station) {
        const std::vector<int>& channels = channel_sets.at(sid);
        const auto cost = build_cost_matrix(groups, channels, gains.at(sid));
        const HungarianResult solved = hungarian(cost);
        double canonical_total = 0.0;
        for (std::size_t g = 0; g < groups.size(); ++g)
            canonical_total += cost[g][g];
        const bool tie = std::abs(canonical_total - solved.total_cost) <=
                         1e-12 * (1.0 + std::abs(solved.total_cost));
        for (std::size_t g = 0; g < groups.size(); ++g)
            groups[g].channel = channels[static_cast<std::size_t>(
                tie ? static_cast<int>(g) : solved.row_to_col[g])];
    }

    // Power allocation with SIC verification. Demoting a pair changes the
    // station's group count and with it every share, so re-check until no
    // pair fails. An infeasible pair splits into two singletons when a spare
    // channel exists, otherwise only the stronger user keeps the channel.
    std::map<int, std::map<int, double>> station_powers; // station -> user -> W
    std::vector<int> dropped_users;
    for (bool changed = true; changed;) {
        changed = false;
        station_powers.clear();
        for (const auto& [sid, groups] : groups_by_station)
            station_powers[sid] =
                allocate_power(groups, station_budget(sid), cfg.alpha_f, cfg.alpha_n);
        for (auto& [sid, groups] : groups_by_station) {
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (!groups[g].is_pair())
                    continue;
                if (check_sic(groups[g], station_powers[sid], gains.at(sid), sigma2,
                              cfg.p_tol))
                    continue;
                const int far = *groups[g].far_user;
                groups[g].far_user.reset();
                if (!leftover.empty()) {
                    NomaGroup solo;
                    solo.station_id = sid;
                    solo.near_user = far;
                    solo.channel = *leftover.begin();
                    leftover.erase(leftover.begin());
                    groups.insert(groups.begin() + static_cast<long>(g) + 1, solo);
                } else {
                    dropped_users.push_back(far);
                }
                changed = true;
            }
            if (changed)
                break; // shares are stale, restart the power pass
        }
    }

    AllocationPlan plan;
    for (const auto& [sid, groups] : groups_by_station) {
        for (const NomaGroup& g : groups) {
            plan.groups.push_back(g);
            plan.powers[{sid, g.near_user, *g.channel}] = station_powers[sid].at(g.near_user);
            if (g.far_user)
                plan.powers[{sid, *g.far_user, *g.channel}] =
                    station_powers[sid].at(*g.far_user);
            plan.total_se +=
                detail::group_se(g, station_powers[sid], gains.at(sid), sigma2,
                                 &plan.per_user_se);
        }
    }
    for (int u : dropped_users)
        plan.per_user_se[u] = 0.0;
    return plan;
}

} // namespace v2xsim
