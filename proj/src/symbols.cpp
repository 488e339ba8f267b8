#include "dmkp/symbols.hpp"

#include <cmath>
#include <string>

#include "dmkp/error.hpp"

namespace dmkp {

std::string_view to_string(DissipationKind kind) {
  switch (kind) {
    case DissipationKind::dmkp: return "dmkp";
    case DissipationKind::burgers: return "burgers";
    case DissipationKind::none: return "none";
  }
  return "none";
}

DissipationKind dissipation_kind_from_string(std::string_view name) {
  if (name == "dmkp") return DissipationKind::dmkp;
  if (name == "burgers") return DissipationKind::burgers;
  if (name == "none") return DissipationKind::none;
  throw ConfigError("unknown dissipation kind '" + std::string(name) + "'");
}

void ModelParams::validate() const {
  if (epsilon != 1.0 && epsilon != -1.0) throw ConfigError("epsilon must be +1 or -1");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw ConfigError("alpha and beta must be finite");
  if (dissipation != DissipationKind::none && alpha <= 0.0) {
    throw ConfigError("alpha must be positive when dissipation is enabled");
  }
}

namespace presets {

ModelParams dmkp(double alpha, double beta, double epsilon) {
  return {alpha, beta, epsilon, DissipationKind::dmkp};
}
ModelParams kpb(double epsilon) { return {1.0, 0.0, epsilon, DissipationKind::burgers}; }
ModelParams kp(double epsilon) { return {1.0, 0.0, epsilon, DissipationKind::none}; }
ModelParams kdv_ks(double alpha) { return {alpha, 0.0, 1.0, DissipationKind::dmkp}; }

}  // namespace presets

ModelParams preset_by_name(std::string_view name, double alpha, double epsilon) {
  if (name == "dmkp") return presets::dmkp(alpha, 1.0, epsilon);
  if (name == "kpb") return presets::kpb(epsilon);
  if (name == "kp") return presets::kp(epsilon);
  if (name == "kdv_ks") {
    auto p = presets::kdv_ks(alpha);
    p.epsilon = epsilon;
    return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

double dispersion(double xi, double eta, const ModelParams& p) {
  if (xi == 0.0) return 0.0;
  return xi * xi * xi - p.epsilon * eta * eta / xi;
}

double dissipation(double xi, const ModelParams& p) {
  const double xi2 = xi * xi;
  switch (p.dissipation) {
    case DissipationKind::dmkp: return p.alpha * (xi2 * xi2 - xi2);
    case DissipationKind::burgers: return p.alpha * xi2;
    case DissipationKind::none: return 0.0;
  }
  return 0.0;
}

std::complex<double> lambda_symbol(double xi, const ModelParams& p) {
  return {-p.beta * xi * xi, 0.5 * xi};
}

double lambda_bound(double xi) { return std::abs(xi) + xi * xi; }

double resonance(double xi, double eta, double xi1, double eta1, const ModelParams& p) {
  const double xi2 = xi - xi1;
  if (xi == 0.0 || xi1 == 0.0 || xi2 == 0.0) {
    throw DegenerateFrequency("resonance: an x-frequency of the triple vanishes");
  }
  const double prod = xi * xi1 * xi2;
  const double shear = eta * xi1 - eta1 * xi;
  return -3.0 * prod - p.epsilon * shear * shear / prod;
}

double dissipation_gap(double xi, double xi1, const ModelParams& p) {
  const double xi2 = xi - xi1;
  if (p.dissipation == DissipationKind::dmkp) {
    return p.alpha * (-2.0 * xi1 * xi2 * (xi1 * xi1 - xi * xi1 + 2.0 * xi * xi - 1.0));
  }
  return dissipation(xi1, p) + dissipation(xi2, p) - dissipation(xi, p);
}

}  // namespace dmkp
