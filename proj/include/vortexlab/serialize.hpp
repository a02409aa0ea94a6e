#pragma once

// JSON views of results. Doubles are written in shortest round-trip form;
// non-finite values become null.

#include "vortexlab/equilibria.hpp"
#include "vortexlab/periodic.hpp"
#include "vortexlab/stationary.hpp"

#include <json.hpp>

namespace vortexlab {

nlohmann::json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v);
nlohmann::json matrix_json(const Eigen::Ref<const Eigen::MatrixXd>& m);  // array of rows
nlohmann::json to_json(const RelativeEquilibrium& eq);
nlohmann::json to_json(const CertificationReport& report);
nlohmann::json to_json(const StationaryPoint& sp);
nlohmann::json to_json(const SuperpositionSpec& spec);
/// Orbit diagnostics; the trajectory itself goes to CSV.
nlohmann::json to_json(const PeriodicOrbit& orbit);

}  // namespace vortexlab
