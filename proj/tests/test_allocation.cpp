#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "v2xsim/allocation.hpp"
#include "v2xsim/rng.hpp"
#include "v2xsim/scenario.hpp"

using namespace v2xsim;
using testsupport::dense_config;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::map<int, double> descending_gains(int n) {
    std::map<int, double> g;
    for (int i = 0; i < n; ++i)
        g[i] = 1e-3 / (i + 1); // user 0 strongest
    return g;
}

double brute_force_min_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int r = 0; r < n; ++r)
            total += cost[r][cols[r]];
        best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

} // namespace

TEST_CASE("pair_users follows the half-offset rule") {
    SECTION("10 users: rank r pairs with rank r+5") {
        const std::vector<int> ids = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        const auto groups = pair_users(ids, descending_gains(10), 0);
        REQUIRE(groups.size() == 5);
        for (int r = 0; r < 5; ++r) {
            CHECK(groups[r].near_user == r);
            REQUIRE(groups[r].far_user.has_value());
            CHECK(*groups[r].far_user == r + 5);
        }
    }
    SECTION("single user becomes an OMA singleton") {
        const auto groups = pair_users({0}, descending_gains(1), 0);
        REQUIRE(groups.size() == 1);
        CHECK_FALSE(groups[0].is_pair());
        CHECK(groups[0].near_user == 0);
    }
    SECTION("5 users: pairs (1,4),(2,5) and middle singleton") {
        const auto groups = pair_users({0, 1, 2, 3, 4}, descending_gains(5), 0);
        REQUIRE(groups.size() == 3);
        CHECK(groups[0].near_user == 0);
        CHECK(*groups[0].far_user == 3);
        CHECK(groups[1].near_user == 1);
        CHECK(*groups[1].far_user == 4);
        CHECK_FALSE(groups[2].is_pair());
        CHECK(groups[2].near_user == 2);
    }
    SECTION("near gain dominates far gain in every pair") {
        auto rng = make_rng(11, "pairing");
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 1 + static_cast<int>(rng.next_u64() % 12);
            std::vector<int> ids;
            std::map<int, double> gains;
            for (int i = 0; i < n; ++i) {
                ids.push_back(i);
                gains[i] = rng.uniform(1e-9, 1e-3);
            }
            for (const auto& g : pair_users(ids, gains, 0))
                if (g.is_pair())
                    CHECK(gains.at(g.near_user) >= gains.at(*g.far_user));
        }
    }
}

TEST_CASE("partition_channels hands out ascending disjoint sets") {
    Cluster c;
    c.members = {3, 4, 5}; // 3 members -> 2 groups

    SECTION("MBS first, then the cluster") {
        const auto sets = partition_channels(25, {c}, 1);
        CHECK(sets.at(0) == std::vector<int>{0});
        CHECK(sets.at(1) == std::vector<int>{1, 2});
    }
    SECTION("no demand, empty sets") {
        Cluster none;
        none.members = {};
        const auto sets = partition_channels(25, {}, 0);
        CHECK(sets.at(0).empty());
    }
    SECTION("insufficient channels is an error with both counts") {
        std::vector<Cluster> many(29, c); // 58 groups + 2 MBS groups
        REQUIRE_THROWS_WITH(partition_channels(25, many, 2),
                            Catch::Matchers::ContainsSubstring("insufficient channels") &&
                                Catch::Matchers::ContainsSubstring("60") &&
                                Catch::Matchers::ContainsSubstring("25"));
    }
}

TEST_CASE("build_cost_matrix uses negative summed gains") {
    NomaGroup pair;
    pair.station_id = 1;
    pair.near_user = 0;
    pair.far_user = 1;
    const std::map<int, double> gains = {{0, 1e-3}, {1, 1e-4}};
    const auto m = build_cost_matrix({pair}, {0}, gains);
    REQUIRE(m.size() == 1);
    REQUIRE(m[0].size() == 1);
    CHECK_THAT(m[0][0], WithinRel(-1.1e-3, 1e-12));

    NomaGroup solo;
    solo.station_id = 1;
    solo.near_user = 0;
    const auto s = build_cost_matrix({solo}, {0, 1, 2}, gains);
    CHECK_THAT(s[0][0], WithinRel(-1e-3, 1e-12));
    CHECK(s[0][0] == s[0][1]);
    CHECK(s[0][1] == s[0][2]);
}

TEST_CASE("hungarian solves the worked example") {
    const auto r = hungarian({{1, 2}, {3, 5}});
    CHECK(r.row_to_col == std::vector<int>{1, 0});
    CHECK(r.total_cost == 5.0);
}

TEST_CASE("hungarian on a zero matrix is any perfect matching with cost 0") {
    const auto r = hungarian(std::vector<std::vector<double>>(4, std::vector<double>(4, 0.0)));
    std::set<int> cols(r.row_to_col.begin(), r.row_to_col.end());
    CHECK(cols.size() == 4);
    CHECK(r.total_cost == 0.0);
}

TEST_CASE("hungarian of an empty matrix is empty") {
    const auto r = hungarian({});
    CHECK(r.row_to_col.empty());
    CHECK(r.total_cost == 0.0);
}

TEST_CASE("hungarian matches exhaustive enumeration") {
    auto rng = make_rng(13, "hungarian");
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 4); // rows 2..5
        const int m = n + static_cast<int>(rng.next_u64() % 3); // up to 2 spare columns
        std::vector<std::vector<double>> cost(n, std::vector<double>(m));
        for (auto& row : cost)
            for (double& x : row)
                x = rng.uniform(-1.0, 0.0);
        const auto r = hungarian(cost);
        std::set<int> cols(r.row_to_col.begin(), r.row_to_col.end());
        REQUIRE(cols.size() == static_cast<std::size_t>(n)); // injective
        CHECK_THAT(r.total_cost, WithinAbs(brute_force_min_cost(cost), 1e-12));
    }
}

TEST_CASE("allocate_power splits equal shares with the alpha coefficients") {
    NomaGroup p1{1, 0, 1, std::nullopt};
    NomaGroup p2{1, 2, 3, std::nullopt};
    const auto powers = allocate_power({p1, p2}, 2.0, 0.8, 0.2);
    CHECK_THAT(powers.at(1), WithinRel(0.8, 1e-12)); // far
    CHECK_THAT(powers.at(0), WithinRel(0.2, 1e-12)); // near
    CHECK_THAT(powers.at(3), WithinRel(0.8, 1e-12));
    CHECK_THAT(powers.at(2), WithinRel(0.2, 1e-12));
    double total = 0.0;
    for (const auto& [u, w] : powers)
        total += w;
    CHECK_THAT(total, WithinRel(2.0, 1e-12));

    NomaGroup solo{1, 7, std::nullopt, std::nullopt};
    CHECK_THAT(allocate_power({solo}, 2.0, 0.8, 0.2).at(7), WithinRel(2.0, 1e-12));
}

TEST_CASE("check_sic") {
    NomaGroup pair{0, 0, 1, std::nullopt};
    const std::map<int, double> powers = {{0, 0.2}, {1, 0.8}};
    const double sigma2 = 1.8e-6;

    SECTION("identical gains never pass a positive threshold") {
        const std::map<int, double> gains = {{0, 1e-3}, {1, 1e-3}};
        CHECK_FALSE(check_sic(pair, powers, gains, sigma2, 0.5));
    }
    SECTION("a 100x gain gap passes at the default threshold") {
        const std::map<int, double> gains = {{0, 1e-3}, {1, 1e-5}};
        CHECK(check_sic(pair, powers, gains, sigma2, 1.0));
    }
    SECTION("zero threshold accepts any ordered pair") {
        const std::map<int, double> gains = {{0, 2e-3}, {1, 1e-3}};
        CHECK(check_sic(pair, powers, gains, sigma2, 0.0));
    }
}

namespace {

ScenarioState two_user_state(int n_mbs, int n_cluster) {
    ScenarioState state;
    int id = 0;
    for (int i = 0; i < n_mbs + n_cluster; ++i)
        state.vehicles.push_back(testsupport::make_vehicle(id++, {100.0 + i, 100.0}, 30.0,
                                                           {500, 500}));
    for (int i = 0; i < n_mbs; ++i)
        state.mbs_users.push_back(i);
    if (n_cluster > 0) {
        Cluster c;
        for (int i = n_mbs; i < n_mbs + n_cluster; ++i)
            c.members.push_back(i);
        c.centroid = {100, 100};
        c.seed_id = n_mbs;
        state.clusters.push_back(c);
        DbsStation s;
        s.id = 1;
        s.position = {100, 100, 10};
        s.power_budget_w = 2.0;
        state.dbs_list.push_back(s);
    }
    state.mbs_position = {500, 500, 25};
    return state;
}

} // namespace

TEST_CASE("build_plan splits the MBS budget over one pair") {
    auto cfg = dense_config();
    cfg.p_tol = 0.0; // keep the pair regardless of link quality
    const auto state = two_user_state(2, 0);
    const std::vector<LinkGain> gains = {{0, 0, -1, 1e-3}, {0, 1, -1, 1e-4}};
    const auto plan = build_plan(state, gains, cfg);
    REQUIRE(plan.groups.size() == 1);
    CHECK(plan.groups[0].is_pair());
    CHECK(plan.groups[0].near_user == 0);
    CHECK(*plan.groups[0].far_user == 1);
    CHECK(*plan.groups[0].channel == 0);
    CHECK_THAT(plan.powers.at({0, 0, 0}), WithinRel(4.0, 1e-12));  // near
    CHECK_THAT(plan.powers.at({0, 1, 0}), WithinRel(16.0, 1e-12)); // far
}

TEST_CASE("build_plan splits one DBS pair") {
    auto cfg = dense_config();
    cfg.p_tol = 0.0;
    const auto state = two_user_state(0, 2);
    const std::vector<LinkGain> gains = {{1, 0, -1, 1e-3}, {1, 1, -1, 1e-4}};
    const auto plan = build_plan(state, gains, cfg);
    REQUIRE(plan.groups.size() == 1);
    CHECK_THAT(plan.powers.at({1, 0, 0}), WithinRel(0.4, 1e-12));
    CHECK_THAT(plan.powers.at({1, 1, 0}), WithinRel(1.6, 1e-12));
}

TEST_CASE("an infeasible pair splits into singletons when channels are spare") {
    auto cfg = dense_config();
    cfg.num_channels = 8;
    cfg.p_tol = 100.0; // unreachable margin
    const auto state = two_user_state(2, 0);
    const std::vector<LinkGain> gains = {{0, 0, -1, 1e-3}, {0, 1, -1, 1e-4}};
    const auto plan = build_plan(state, gains, cfg);
    REQUIRE(plan.groups.size() == 2);
    CHECK_FALSE(plan.groups[0].is_pair());
    CHECK_FALSE(plan.groups[1].is_pair());
    // two singleton groups split the budget equally
    CHECK_THAT(plan.powers.at({0, 0, 0}), WithinRel(10.0, 1e-12));
    CHECK_THAT(plan.powers.at({0, 1, 1}), WithinRel(10.0, 1e-12));
}

TEST_CASE("an infeasible pair without spare channels keeps only the stronger user") {
    auto cfg = dense_config();
    cfg.num_channels = 1;
    cfg.p_tol = 100.0;
    const auto state = two_user_state(2, 0);
    const std::vector<LinkGain> gains = {{0, 0, -1, 1e-3}, {0, 1, -1, 1e-4}};
    const auto plan = build_plan(state, gains, cfg);
    REQUIRE(plan.groups.size() == 1);
    CHECK_FALSE(plan.groups[0].is_pair());
    CHECK(plan.groups[0].near_user == 0);
    CHECK_THAT(plan.powers.at({0, 0, 0}), WithinRel(20.0, 1e-12));
    CHECK(plan.per_user_se.at(1) == 0.0); // dropped user
}

TEST_CASE("total_spectral_efficiency") {
    SECTION("empty plan is zero") {
        CHECK(total_spectral_efficiency(AllocationPlan{}, {}, 1e-6) == 0.0);
    }
    SECTION("one OMA group with SINR 1") {
        AllocationPlan plan;
        NomaGroup solo{0, 0, std::nullopt, 0};
        plan.groups = {solo};
        plan.powers[{0, 0, 0}] = 1.0;
        const std::map<int, std::map<int, double>> gains = {{0, {{0, 1e-6}}}};
        CHECK_THAT(total_spectral_efficiency(plan, gains, 1e-6), WithinRel(1.0, 1e-12));
    }
    SECTION("one pair sums the worked link examples") {
        AllocationPlan plan;
        NomaGroup pair{0, 0, 1, 0};
        plan.groups = {pair};
        plan.powers[{0, 0, 0}] = 0.2; // near
        plan.powers[{0, 1, 0}] = 0.8; // far
        const std::map<int, std::map<int, double>> gains = {{0, {{0, 1e-2}, {1, 1e-3}}}};
        const double expected = std::log2(1.0 + 2e-3 / 1.8e-6) +
                                std::log2(1.0 + 8e-4 / (2e-4 + 1.8e-6));
        CHECK_THAT(total_spectral_efficiency(plan, gains, 1.8e-6), WithinRel(expected, 1e-12));
    }
}

TEST_CASE("plans from random scenarios satisfy every constraint") {
    const auto cfg = dense_config();
    const double sigma2 = noise_power_w(cfg.n0_dbm_hz, cfg.channel_bandwidth_hz);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto state = make_scenario_state(cfg, seed);
        const auto link_gains = compute_link_gains(state, cfg);
        const auto plan = build_plan(state, link_gains, cfg);

        std::map<int, std::map<int, double>> gains;
        for (const auto& lg : link_gains)
            gains[lg.station_id][lg.user_id] = lg.gain;

        // C4/C5: each channel belongs to one group of one station
        std::set<int> used_channels;
        for (const auto& g : plan.groups) {
            REQUIRE(g.channel.has_value());
            REQUIRE(used_channels.insert(*g.channel).second);
            REQUIRE(*g.channel < cfg.num_channels);
            if (g.is_pair()) {
                CHECK(gains[g.station_id][g.near_user] >= gains[g.station_id][*g.far_user]);
                // C1 on survivors
                const double margin = sic_margin(plan.powers.at({g.station_id, g.near_user, *g.channel}),
                                                 gains[g.station_id][g.near_user],
                                                 plan.powers.at({g.station_id, *g.far_user, *g.channel}),
                                                 gains[g.station_id][*g.far_user], sigma2);
                CHECK(margin >= cfg.p_tol);
            }
        }

        // C2/C3 with equality for stations that host groups
        std::map<int, double> per_station;
        for (const auto& [key, watts] : plan.powers) {
            CHECK(watts >= 0.0);
            per_station[std::get<0>(key)] += watts;
        }
        for (const auto& [sid, total] : per_station) {
            const double budget = sid == 0 ? cfg.p_b_max : cfg.p_k_max;
            CHECK_THAT(total, WithinRel(budget, 1e-9));
        }

        // objective consistency: straight-line recomputation of the sum rate
        double recomputed = 0.0;
        for (const auto& g : plan.groups) {
            const double hn = gains[g.station_id][g.near_user];
            const double pn = plan.powers.at({g.station_id, g.near_user, *g.channel});
            if (g.is_pair()) {
                const double hf = gains[g.station_id][*g.far_user];
                const double pf = plan.powers.at({g.station_id, *g.far_user, *g.channel});
                recomputed += std::log2(1.0 + pf * hf / (pn * hf + sigma2));
                recomputed += std::log2(1.0 + pn * hn / sigma2);
            } else {
                recomputed += std::log2(1.0 + pn * hn / sigma2);
            }
        }
        CHECK_THAT(plan.total_se, WithinRel(recomputed, 1e-12));
        CHECK_THAT(total_spectral_efficiency(plan, gains, sigma2), WithinRel(recomputed, 1e-12));
    }
}
