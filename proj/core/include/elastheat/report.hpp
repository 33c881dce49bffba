#ifndef ELASTHEAT_REPORT_HPP
#define ELASTHEAT_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "elastheat/estimates.hpp"
#include "elastheat/green.hpp"
#include "elastheat/kernel.hpp"
#include "elastheat/parabolic.hpp"

namespace elastheat {

nlohmann::json to_json(const EstimateReport& rep);
nlohmann::json to_json(const SymmetryCheckResult& res);
nlohmann::json to_json(const EpsLadderReport& rep);
nlohmann::json to_json(const KornReport& rep);
nlohmann::json to_json(const CrosscheckResult& res);

/// CSV with columns (xi, yi, t, K11, K12, K21, K22) over the probe cloud.
std::string kernel_csv(const KernelField& field, const Mesh& mesh,
                       const std::vector<ProbePoint>& probes);

/// CSV with columns (x1, x2, y1, y2, G11, G12, G21, G22, tail_bound).
std::string green_csv(const GreenField& field, const Mesh& mesh,
                      const std::vector<Vec2>& probes);

/// CSV with columns (t, mass_norm_sq, stiffness_energy, rigid moments...).
std::string energy_csv(const Trajectory& traj);

/// CSV with columns (t, dof, value); gated behind a flag by callers.
std::string trajectory_csv(const Trajectory& traj);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace elastheat

#endif
