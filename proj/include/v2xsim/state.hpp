#pragma once

#include <vector>

#include "v2xsim/clustering.hpp"
#include "v2xsim/geometry.hpp"
#include "v2xsim/mobility.hpp"

namespace v2xsim {

/// Snapshot of one scenario: vehicles, their clustering, and the stations.
/// Vehicles not listed in any cluster are served by the MBS (station 0).
struct ScenarioState {
    std::vector<Vehicle> vehicles;
    std::vector<Cluster> clusters;
    std::vector<DbsStation> dbs_list;
    std::vector<int> mbs_users; ///< ascending vehicle ids
    Vec3 mbs_position;
    double time_s = 0.0;
};

} // namespace v2xsim
