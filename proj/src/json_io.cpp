#include "mcm/json_io.hpp"

#include <fstream>
#include <sstream>

namespace mcm {

using nlohmann::json;

json to_json(const Instance& instance) {
  json j;
  json opps = json::array();
  for (const auto& o : instance.opportunities) opps.push_back({{"id", o.id}, {"capacity", o.capacity}});
  j["opportunities"] = std::move(opps);

  json arr = json::array();
  for (const auto& v : instance.arrivals) {
    if (v.is_external()) {
      arr.push_back({{"t", v.t}, {"source", "ext"}, {"target", v.target},
                     {"ext_signup_prob", v.ext_signup_prob}});
    } else {
      arr.push_back({{"t", v.t}, {"source", "int"}, {"mu", v.mu}});
    }
  }
  j["arrivals"] = std::move(arr);

  if (instance.cascade) {
    j["cascade"] = {{"view_prob", instance.cascade->view_prob},
                    {"exit_prob", instance.cascade->exit_prob},
                    {"max_list_len", instance.cascade->max_list_len}};
  } else {
    j["cascade"] = nullptr;
  }
  j["recency"] = instance.recency ? json(*instance.recency) : json(nullptr);
  if (!instance.meta.empty()) j["meta"] = instance.meta;
  return j;
}

Instance instance_from_json(const json& j) {
  Instance inst;
  try {
    for (const auto& o : j.at("opportunities")) {
      inst.opportunities.push_back({o.at("id").get<int>(), o.at("capacity").get<int>()});
    }
    for (const auto& a : j.at("arrivals")) {
      Volunteer v;
      v.t = a.at("t").get<int>();
      const auto src = a.at("source").get<std::string>();
      if (src == "ext") {
        v.source = Source::External;
        v.target = a.contains("target") && !a["target"].is_null() ? a["target"].get<int>() : kDummy;
        v.ext_signup_prob = a.value("ext_signup_prob", 1.0);
        if (a.contains("mu")) v.mu = a["mu"].get<std::vector<double>>();
      } else if (src == "int") {
        v.source = Source::Internal;
        v.mu = a.at("mu").get<std::vector<double>>();
        if (a.contains("target") && !a["target"].is_null()) v.target = a["target"].get<int>();
      } else {
        throw ValidationError("unknown source '" + src + "'");
      }
      inst.arrivals.push_back(std::move(v));
    }
    if (j.contains("cascade") && !j["cascade"].is_null()) {
      const auto& c = j["cascade"];
      CascadeParams p;
      p.view_prob = c.at("view_prob").get<std::vector<double>>();
      p.exit_prob = c.at("exit_prob").get<std::vector<double>>();
      p.max_list_len = c.at("max_list_len").get<int>();
      inst.cascade = std::move(p);
    }
    if (j.contains("recency") && !j["recency"].is_null()) {
      inst.recency = j["recency"].get<std::vector<double>>();
    }
    if (j.contains("meta")) inst.meta = j["meta"];
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance JSON: ") + e.what());
  }
  return inst;
}

std::vector<Instance> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
  std::vector<Instance> out;
  if (j.contains("instances")) {
    for (const auto& x : j["instances"]) out.push_back(instance_from_json(x));
  } else {
    out.push_back(instance_from_json(j));
  }
  return out;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace mcm
