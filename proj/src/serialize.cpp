#include "vortexlab/serialize.hpp"

#include <cmath>

namespace vortexlab {
namespace {

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

nlohmann::json numbers(const std::vector<double>& xs) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

}  // namespace

nlohmann::json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

nlohmann::json matrix_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

nlohmann::json to_json(const RelativeEquilibrium& eq) {
  return {
      {"catalog", eq.catalog},
      {"strengths", numbers(eq.strengths)},
      {"positions", vector_json(eq.z)},
      {"omega", number(eq.omega)},
      {"sigma", eq.sigma.image()},
      {"order", eq.order()},
  };
}

nlohmann::json to_json(const CertificationReport& report) {
  return {
      {"periodic_solution_count", report.periodic_solution_count},
      {"symmetric_count", report.symmetric_count},
      {"nondegenerate", report.nondegenerate},
      {"sigma_nondegenerate", report.sigma_nondegenerate},
      {"omega", number(report.omega)},
      {"residual", number(report.residual)},
      {"singular_values", vector_json(report.singular_values)},
      {"symmetric_singular_values", vector_json(report.symmetric_singular_values)},
  };
}

nlohmann::json to_json(const StationaryPoint& sp) {
  return {
      {"domain", sp.domain ? sp.domain->name() : std::string()},
      {"strengths", numbers(sp.strengths)},
      {"positions", vector_json(sp.positions)},
      {"gradient_norm", number(sp.gradient_norm)},
      {"hessian", matrix_json(sp.hessian)},
      {"hessian_singular_values", vector_json(sp.hessian_singular_values)},
      {"kernel_dimension", sp.kernel_dimension},
      {"classification", to_string(sp.classification)},
      {"iterations", sp.iterations},
      {"gradient_history", numbers(sp.gradient_history)},
  };
}

nlohmann::json to_json(const SuperpositionSpec& spec) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : spec.clusters) clusters.push_back(to_json(c));
  return {
      {"domain", spec.stationary.domain ? spec.stationary.domain->name() : std::string()},
      {"anchor_strengths", numbers(spec.stationary.strengths)},
      {"anchors", vector_json(spec.stationary.positions)},
      {"clusters", clusters},
      {"phases", numbers(spec.phases)},
      {"r", number(spec.r)},
  };
}

nlohmann::json to_json(const PeriodicOrbit& orbit) {
  return {
      {"r", number(orbit.r)},
      {"tau", number(orbit.tau)},
      {"period", number(orbit.period)},
      {"u0", vector_json(orbit.u0)},
      {"iterations", orbit.iterations},
      {"residual_history", numbers(orbit.residual_history)},
      {"residual", number(orbit.residual)},
      {"closure", number(orbit.closure)},
      {"physical_closure", number(orbit.physical_closure)},
      {"symmetry_defect", number(orbit.symmetry_defect)},
      {"energy_drift", number(orbit.energy_drift)},
      {"distance_to_M", number(orbit.distance_to_M)},
      {"winding", orbit.winding},
  };
}

}  // namespace vortexlab
