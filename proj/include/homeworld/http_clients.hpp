#pragma once

#include <regex>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "homeworld/agent.hpp"
#include "homeworld/planning.hpp"
#include "homeworld/similarity.hpp"

namespace homeworld {

/// "http://host:port/base" split into the part httplib connects to and the
/// path prefix.
struct Endpoint {
  std::string origin;
  std::string base;
};

inline Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(http://[A-Za-z0-9.\-]+(:[0-9]{1,5})?)(/[^\s?#]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::InvalidArgument, "endpoint must be http://host[:port][/path]", url);
  Endpoint e{m[1].str(), m[3].str()};
  while (!e.base.empty() && e.base.back() == '/') e.base.pop_back();
  return e;
}

struct HttpOptions {
  double timeout_s = 10.0;
};

namespace detail {

inline nlohmann::json post_json(const std::string& url, const std::string& route, const nlohmann::json& body,
                                const HttpOptions& opt) {
  const Endpoint ep = parse_endpoint(url);
  httplib::Client cli(ep.origin);
  const auto secs = static_cast<time_t>(opt.timeout_s);
  const auto usecs = static_cast<time_t>((opt.timeout_s - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  auto res = cli.Post(ep.base + route, body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::Transport, url + route + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCode::Transport, url + route + ": HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace detail

/// Asks a planner service for subgoal phrases. Every phrase must match;
/// the first that does not raises UnmatchablePhrase with its index as token.
inline std::vector<SubgoalPhrase> plan_external(const Instruction& inst, const std::string& endpoint,
                                                const ClassRegistry& reg = default_registry(),
                                                const HttpOptions& opt = {}) {
  nlohmann::json req;
  req["instruction"] = inst.text;
  req["prefix"] = inst.prefix ? nlohmann::json(*inst.prefix) : nlohmann::json(nullptr);
  req["classes"] = reg.names();
  const nlohmann::json res = detail::post_json(endpoint, "/plan", req, opt);
  if (!res.is_object() || !res.contains("subgoals") || !res["subgoals"].is_array())
    throw Error(ErrorCode::MalformedResponse, "expected {subgoals: [string]}");
  std::vector<SubgoalPhrase> out;
  for (const auto& s : res["subgoals"]) {
    if (!s.is_string()) throw Error(ErrorCode::MalformedResponse, "subgoal is not a string");
    const int i = static_cast<int>(out.size());
    out.push_back({s.get<std::string>(), i});
    try {
      match(out.back(), reg);
    } catch (const Error& e) {
      throw Error(ErrorCode::UnmatchablePhrase, "phrase " + std::to_string(i) + " '" + out.back().text + "': " + e.what(),
                  std::to_string(i));
    }
  }
  return out;
}

/// Planner hook for run_episode backed by plan_external.
inline PlannerFn http_planner(std::string endpoint, const ClassRegistry& reg = default_registry(), HttpOptions opt = {}) {
  return [endpoint = std::move(endpoint), &reg, opt](const Instruction& inst) {
    std::vector<std::string> out;
    for (auto& p : plan_external(inst, endpoint, reg, opt)) out.push_back(std::move(p.text));
    return out;
  };
}

/// Embedding function calling POST /embed. Failures surface as ServiceError.
inline EmbedFn http_embedder(std::string endpoint, HttpOptions opt = {}) {
  parse_endpoint(endpoint);
  return [endpoint = std::move(endpoint), opt](const std::vector<std::string>& terms) {
    nlohmann::json res;
    try {
      res = detail::post_json(endpoint, "/embed", {{"terms", terms}}, opt);
    } catch (const Error& e) {
      throw Error(ErrorCode::ServiceError, e.what());
    }
    if (!res.is_object() || !res.contains("vectors") || !res["vectors"].is_array() || res["vectors"].size() != terms.size())
      throw Error(ErrorCode::ServiceError, "expected {vectors: [[number]]} with one vector per term");
    std::vector<Vector> out;
    for (const auto& v : res["vectors"]) {
      Vector x;
      for (const auto& n : v) {
        if (!n.is_number()) throw Error(ErrorCode::ServiceError, "vector entry is not a number");
        x.push_back(n.get<double>());
      }
      out.push_back(std::move(x));
    }
    return out;
  };
}

}  // namespace homeworld
