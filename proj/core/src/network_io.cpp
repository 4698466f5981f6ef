#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cavity/network.hpp"

#include <json.hpp>

namespace cavity {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

double parse_weight(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw std::invalid_argument(where + ": weight must be a number");
  }
  return j.get<double>();
}

LocalMeasure parse_measure(const json& j, int vertex, int degree) {
  const std::string where = "vertex " + std::to_string(vertex);
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument(where + ": measure must be an object with a "
                                        "\"type\" string");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "bmatching") {
    if (!j.contains("b") || !j["b"].is_number_integer()) {
      throw std::invalid_argument(where +
                                  ": bmatching measure needs integer \"b\"");
    }
    return LocalMeasure::b_matching(degree, j["b"].get<int>());
  }
  if (type == "exchangeable") {
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) {
      throw std::invalid_argument(where +
                                  ": exchangeable measure needs \"coeffs\"");
    }
    std::vector<double> coeffs;
    for (const json& c : j["coeffs"]) {
      coeffs.push_back(parse_weight(c, where));
    }
    if (static_cast<int>(coeffs.size()) != degree + 1) {
      throw std::invalid_argument(
          where + ": coeffs must have length degree+1 = " +
          std::to_string(degree + 1) + ", got " +
          std::to_string(coeffs.size()));
    }
    return LocalMeasure::exchangeable(std::move(coeffs));
  }
  if (type == "table") {
    if (!j.contains("entries") || !j["entries"].is_array()) {
      throw std::invalid_argument(where + ": table measure needs \"entries\"");
    }
    std::vector<LocalMeasure::TableEntry> entries;
    for (const json& item : j["entries"]) {
      if (!item.is_object() || !item.contains("subset") ||
          !item.contains("weight") || !item["subset"].is_array()) {
        throw std::invalid_argument(
            where + ": table entries need \"subset\" and \"weight\"");
      }
      LocalMeasure::TableEntry entry;
      for (const json& s : item["subset"]) {
        if (!s.is_number_integer()) {
          throw std::invalid_argument(where +
                                      ": subset indices must be integers");
        }
        int slot = s.get<int>();
        if (slot < 0 || slot >= degree) {
          throw std::invalid_argument(
              where + ": table subset slot " + std::to_string(slot) +
              " outside the vertex's incident range 0.." +
              std::to_string(degree - 1));
        }
        entry.subset.push_back(slot);
      }
      entry.weight = parse_weight(item["weight"], where);
      entries.push_back(std::move(entry));
    }
    try {
      return LocalMeasure::table(degree, entries);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(where + ": " + err.what());
    }
  }
  throw std::invalid_argument(where + ": unknown measure type \"" + type +
                              "\"");
}

}  // namespace

Network load_network(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("malformed network JSON: ") +
                                err.what());
  }
  if (!root.is_object() || !root.contains("vertices") ||
      !root["vertices"].is_array() || !root.contains("edges") ||
      !root["edges"].is_array()) {
    throw std::invalid_argument(
        "network JSON must be {\"vertices\":[...],\"edges\":[...]}");
  }

  const json& jvertices = root["vertices"];
  const int n = static_cast<int>(jvertices.size());

  std::vector<std::pair<int, int>> edges;
  for (const json& je : root["edges"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer()) {
      throw std::invalid_argument(
          "edges must be two-element integer arrays, got " + je.dump());
    }
    edges.emplace_back(je[0].get<int>(), je[1].get<int>());
  }

  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : edges) {
    if (u >= 0 && u < n) ++deg[static_cast<std::size_t>(u)];
    if (v >= 0 && v < n) ++deg[static_cast<std::size_t>(v)];
  }

  std::vector<const json*> measure_json(static_cast<std::size_t>(n), nullptr);
  for (const json& jv : jvertices) {
    if (!jv.is_object() || !jv.contains("id") ||
        !jv["id"].is_number_integer() || !jv.contains("measure")) {
      throw std::invalid_argument(
          "vertices must be objects with \"id\" and \"measure\"");
    }
    int id = jv["id"].get<int>();
    if (id < 0 || id >= n) {
      throw std::invalid_argument("vertex id " + std::to_string(id) +
                                  " outside 0.." + std::to_string(n - 1));
    }
    if (measure_json[static_cast<std::size_t>(id)] != nullptr) {
      throw std::invalid_argument("vertex id " + std::to_string(id) +
                                  " appears twice");
    }
    measure_json[static_cast<std::size_t>(id)] = &jv["measure"];
  }

  std::vector<LocalMeasure> measures;
  measures.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    measures.push_back(parse_measure(*measure_json[static_cast<std::size_t>(v)],
                                     v, deg[static_cast<std::size_t>(v)]));
  }
  return Network(n, std::move(edges), std::move(measures));
}

namespace {

void append_measure(std::string& out, const LocalMeasure& mu) {
  switch (mu.kind()) {
    case MeasureKind::BMatching:
      out += "{\"type\":\"bmatching\",\"b\":";
      out += std::to_string(mu.capacity());
      out += "}";
      return;
    case MeasureKind::Exchangeable: {
      out += "{\"type\":\"exchangeable\",\"coeffs\":[";
      const std::vector<double>& c = mu.coeffs();
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k > 0) out += ",";
        out += format_double(c[k]);
      }
      out += "]}";
      return;
    }
    case MeasureKind::Table: {
      out += "{\"type\":\"table\",\"entries\":[";
      bool first = true;
      for (const auto& [mask, weight] : mu.support()) {
        if (!first) out += ",";
        first = false;
        out += "{\"subset\":[";
        bool first_slot = true;
        for (int s = 0; s < mu.ground_size(); ++s) {
          if (mask & (1u << s)) {
            if (!first_slot) out += ",";
            first_slot = false;
            out += std::to_string(s);
          }
        }
        out += "],\"weight\":";
        out += format_double(weight);
        out += "}";
      }
      out += "]}";
      return;
    }
  }
  throw std::logic_error("unreachable measure kind");
}

}  // namespace

std::string save_network(const Network& net) {
  std::string out = "{\"vertices\":[";
  for (int v = 0; v < net.n_vertices(); ++v) {
    if (v > 0) out += ",";
    out += "{\"id\":";
    out += std::to_string(v);
    out += ",\"measure\":";
    append_measure(out, net.measure(v));
    out += "}";
  }
  out += "],\"edges\":[";
  for (int e = 0; e < net.n_edges(); ++e) {
    if (e > 0) out += ",";
    const auto& [u, v] = net.edges()[static_cast<std::size_t>(e)];
    out += "[" + std::to_string(u) + "," + std::to_string(v) + "]";
  }
  out += "]}\n";
  return out;
}

}
