#include "elastheat/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elastheat {

nlohmann::json to_json(const EstimateReport& rep) {
  nlohmann::json j;
  j["id"] = rep.id;
  j["pass"] = rep.pass;
  j["constants"] = nlohmann::json::object();
  for (const auto& [k, v] : rep.constants) j["constants"][k] = v;
  if (!rep.samples.empty()) j["samples"] = rep.samples;
  if (!rep.worst.empty()) j["worst"] = rep.worst;
  return j;
}

nlohmann::json to_json(const SymmetryCheckResult& res) {
  return {{"id", "symmetry"},
          {"pass", res.pass},
          {"pairing_max_rel", res.pairing_max_rel},
          {"pointwise_max_abs", res.pointwise_max_abs}};
}

nlohmann::json to_json(const EpsLadderReport& rep) {
  return {{"id", "epsilon-ladder"},
          {"epsilons", rep.epsilons},
          {"cauchy_differences", rep.cauchy_differences},
          {"pass", rep.cauchy_decreasing}};
}

nlohmann::json to_json(const KornReport& rep) {
  nlohmann::json levels = nlohmann::json::array();
  for (const KornLevel& l : rep.levels) {
    levels.push_back({{"h", l.h},
                      {"dofs", l.dofs},
                      {"korn2_constant", l.korn2_constant},
                      {"friedrichs_constant", l.friedrichs_constant},
                      {"coercivity_rho", l.coercivity_rho},
                      {"first_korn_ratio", l.first_korn_ratio}});
  }
  return {{"id", "korn"},
          {"levels", levels},
          {"first_korn_applicable", rep.first_korn_applicable}};
}

nlohmann::json to_json(const CrosscheckResult& res) {
  return {{"id", "green-static-crosscheck"},
          {"relative_error", res.relative_error},
          {"compatibility_flagged", res.compatibility_flagged},
          {"sources", res.sources}};
}

std::string kernel_csv(const KernelField& field, const Mesh& mesh,
                       const std::vector<ProbePoint>& probes) {
  TriLocator locator(mesh);
  std::ostringstream out;
  out.precision(17);
  out << "xi,yi,t,K11,K12,K21,K22\n";
  for (const ProbePoint& p : probes) {
    const Mat2 k = kernel_at(field, mesh, locator, p.x, p.t);
    out << p.x.x << ',' << p.x.y << ',' << p.t << ',' << k(0, 0) << ',' << k(0, 1) << ','
        << k(1, 0) << ',' << k(1, 1) << '\n';
  }
  return out.str();
}

std::string green_csv(const GreenField& field, const Mesh& mesh,
                      const std::vector<Vec2>& probes) {
  TriLocator locator(mesh);
  std::ostringstream out;
  out.precision(17);
  out << "x1,x2,y1,y2,G11,G12,G21,G22,tail_bound\n";
  for (const Vec2& x : probes) {
    const Mat2 g = green_at(field, mesh, locator, x);
    out << x.x << ',' << x.y << ',' << field.y.x << ',' << field.y.y << ',' << g(0, 0) << ','
        << g(0, 1) << ',' << g(1, 0) << ',' << g(1, 1) << ',' << field.tail_bound << '\n';
  }
  return out.str();
}

std::string energy_csv(const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  out << "t,mass_norm_sq,stiffness_energy";
  const std::size_t moments =
      traj.energy_log.empty() ? 0 : traj.energy_log.front().rigid_moments.size();
  for (std::size_t i = 0; i < moments; ++i) out << ",rigid_moment_" << i;
  out << '\n';
  for (const EnergyEntry& e : traj.energy_log) {
    out << e.t << ',' << e.mass_norm_sq << ',' << e.stiffness_energy;
    for (double m : e.rigid_moments) out << ',' << m;
    out << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  out << "t,dof,value\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (std::size_t d = 0; d < traj.states[k].size(); ++d) {
      out << traj.times[k] << ',' << d << ',' << traj.states[k][d] << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace elastheat
