#include "elastheat/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elastheat {

PolygonalDomain parse_domain(const nlohmann::json& j) {
  PolygonalDomain d;
  if (!j.contains("outer")) throw std::runtime_error("domain: missing 'outer' ring");
  for (const auto& v : j.at("outer")) {
    d.outer.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  }
  if (j.contains("holes")) {
    for (const auto& ring : j.at("holes")) {
      Ring h;
      for (const auto& v : ring) h.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      d.holes.push_back(std::move(h));
    }
  }
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) {
      const std::string s = l.get<std::string>();
      if (s != "D" && s != "N") throw std::runtime_error("domain: label must be D or N");
      d.edge_labels.push_back(s == "D" ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann);
    }
  } else if (j.contains("segments")) {
    // (edge id, label) pairs; must cover every edge exactly once.
    std::vector<int> seen;
    int edges = static_cast<int>(d.outer.size());
    for (const auto& h : d.holes) edges += static_cast<int>(h.size());
    d.edge_labels.assign(edges, BoundaryLabel::Dirichlet);
    seen.assign(edges, 0);
    for (const auto& seg : j.at("segments")) {
      const int e = seg.at(0).get<int>();
      const std::string s = seg.at(1).get<std::string>();
      if (e < 0 || e >= edges) throw std::runtime_error("domain: segment edge id out of range");
      d.edge_labels[e] = s == "D" ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
      seen[e]++;
    }
    for (int c : seen) {
      if (c != 1) throw std::runtime_error("domain: segments must cover each edge exactly once");
    }
  } else {
    throw std::runtime_error("domain: need 'labels' or 'segments'");
  }
  d.validate();
  return d;
}

nlohmann::json domain_to_json(const PolygonalDomain& d) {
  nlohmann::json j;
  j["outer"] = nlohmann::json::array();
  for (const Vec2& v : d.outer) j["outer"].push_back({v.x, v.y});
  j["holes"] = nlohmann::json::array();
  for (const Ring& h : d.holes) {
    nlohmann::json ring = nlohmann::json::array();
    for (const Vec2& v : h) ring.push_back({v.x, v.y});
    j["holes"].push_back(ring);
  }
  j["labels"] = nlohmann::json::array();
  for (BoundaryLabel l : d.edge_labels) {
    j["labels"].push_back(l == BoundaryLabel::Dirichlet ? "D" : "N");
  }
  return j;
}

namespace {

std::shared_ptr<ElasticityTensor> parse_tensor(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "lame") {
    return std::make_shared<ElasticityTensor>(
        make_lame_tensor(j.at("mu").get<double>(), j.at("lambda").get<double>()));
  }
  throw std::runtime_error("tensor: unknown type '" + type + "' (inline configs support lame)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir) {
  ExperimentConfig c;
  auto resolve = [&base_dir](const std::string& p) {
    if (p.empty() || p.front() == '/' || base_dir.empty()) return p;
    return base_dir + "/" + p;
  };

  if (j.contains("domain_file")) {
    c.domain = parse_domain(nlohmann::json::parse(slurp(resolve(j.at("domain_file")))));
  } else {
    c.domain = parse_domain(j.at("domain"));
  }
  if (j.contains("tensor_file")) {
    c.tensor = std::make_shared<ElasticityTensor>(
        read_tensor_text(slurp(resolve(j.at("tensor_file")))));
  } else {
    c.tensor = parse_tensor(j.at("tensor"));
  }

  c.target_h = j.value("target_h", c.target_h);
  c.refine_steps = j.value("refine", c.refine_steps);
  if (j.contains("time")) {
    const auto& t = j.at("time");
    c.t_end = t.value("t_end", c.t_end);
    c.tau_min = t.value("tau_min", c.tau_min);
    c.grading_ratio = t.value("grading", c.grading_ratio);
    c.tau_max = t.value("tau_max", c.tau_max);
  }
  if (j.contains("epsilon_ladder")) {
    for (const auto& e : j.at("epsilon_ladder")) c.epsilon_ladder.push_back(e.get<double>());
  }
  if (j.contains("sources")) {
    for (const auto& s : j.at("sources")) {
      c.sources.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    }
  }
  if (j.contains("green_source")) {
    c.green_source = Vec2{j.at("green_source").at(0).get<double>(),
                          j.at("green_source").at(1).get<double>()};
  }
  if (j.contains("suites")) {
    for (const auto& s : j.at("suites")) c.suites.push_back(s.get<std::string>());
  }
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.corkscrew_r0 = j.value("corkscrew_r0", c.corkscrew_r0);
  c.corkscrew_m = j.value("corkscrew_m", c.corkscrew_m);
  c.probe_count = j.value("probe_count", c.probe_count);
  c.korn_depth = j.value("korn_depth", c.korn_depth);
  c.korn_target_h = j.value("korn_target_h", c.korn_target_h);
  c.dump_trajectories = j.value("dump_trajectories", c.dump_trajectories);
  c.gaussian_c_ceiling = j.value("gaussian_c_ceiling", c.gaussian_c_ceiling);

  // Canonical digest source: the fully-resolved config (inline domain and
  // tensor), so file indirection cannot alias two distinct experiments.
  nlohmann::json canon = j;
  canon.erase("domain_file");
  canon.erase("tensor_file");
  canon["domain"] = domain_to_json(c.domain);
  if (c.tensor->lame_params()) {
    canon["tensor"] = {{"type", "lame"},
                       {"mu", c.tensor->lame_params()->first},
                       {"lambda", c.tensor->lame_params()->second}};
  }
  canon.erase("out_dir");
  c.digest_source = canon.dump();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  const std::string text = slurp(path);
  std::string base;
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base = path.substr(0, slash);
  return parse_config(nlohmann::json::parse(text), base);
}

std::string config_digest(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : config.digest_source) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace elastheat
