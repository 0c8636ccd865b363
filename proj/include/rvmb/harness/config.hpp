#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rvmb/error.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/uarch/minor.hpp"
#include "rvmb/uarch/o3.hpp"

namespace rvmb::harness {

inline const std::vector<std::string>& known_models() {
  static const std::vector<std::string> m = {"atomic", "minor", "o3"};
  return m;
}

/// Run matrix configuration. JSON keys (all optional except benchmarks):
///
///   benchmarks  list of suite names or program paths (.graph, .s, ELF)
///   models      subset of ["atomic", "minor", "o3"]    default: all three
///   limit       instruction limit per cell            default: per-program bound
///   output_dir  where results.{json,csv,md} go         default: "results"
///   seed        input seed (RVMB_SEED overrides)       default: 1
///   jobs        worker threads, 0 = hardware threads   default: 0
///   cache       { l1i|l1d|l2: {size, ways, line, hit_latency}, dram_latency }
///   minor       { perfect_icache }
///   o3          { rob_size, fetch_width, issue_width, commit_width, int_alu,
///                 int_muldiv, fp_fma, mem_ports, load_queue, store_queue,
///                 mispredict_penalty, perfect_icache }
struct RunConfig {
  std::vector<std::string> benchmarks;
  std::vector<std::string> models = known_models();
  memhier::HierarchyConfig cache;
  uarch::MinorConfig minor;
  uarch::O3Config o3;
  std::optional<uint64_t> limit;
  std::string output_dir = "results";
  uint64_t seed = 1;
  unsigned jobs = 0;

  void validate() const {
    if (benchmarks.empty()) throw Error(ErrorCode::InvalidConfig, "at least one benchmark is required");
    if (models.empty()) throw Error(ErrorCode::InvalidConfig, "at least one model is required");
    std::set<std::string> seen;
    for (const std::string& m : models) {
      bool ok = false;
      for (const std::string& k : known_models()) ok |= m == k;
      if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown model '" + m + "'");
      if (!seen.insert(m).second) throw Error(ErrorCode::InvalidConfig, "model '" + m + "' listed twice");
    }
    if (limit && *limit == 0) throw Error(ErrorCode::InvalidConfig, "limit must be > 0");
    cache.validate();
    minor.validate();
    o3.validate();
  }
};

namespace config_detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* key : keys) ok |= k == key;
    if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

inline void read_cache(const json& j, const std::string& name, memhier::CacheConfig& c) {
  check_keys(j, name, {"size", "ways", "line", "hit_latency"});
  read(j, "size", c.size);
  read(j, "ways", c.ways);
  read(j, "line", c.line);
  read(j, "hit_latency", c.hit_latency);
}

}  // namespace config_detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  check_keys(j, "config", {"benchmarks", "models", "limit", "output_dir", "seed", "jobs", "cache", "minor", "o3"});
  RunConfig c;
  read(j, "benchmarks", c.benchmarks);
  read(j, "models", c.models);
  if (j.contains("limit")) {
    uint64_t limit = 0;
    read(j, "limit", limit);
    c.limit = limit;
  }
  read(j, "output_dir", c.output_dir);
  read(j, "seed", c.seed);
  read(j, "jobs", c.jobs);
  if (j.contains("cache")) {
    const json& cj = j.at("cache");
    check_keys(cj, "cache", {"l1i", "l1d", "l2", "dram_latency"});
    if (cj.contains("l1i")) read_cache(cj.at("l1i"), "cache.l1i", c.cache.l1i);
    if (cj.contains("l1d")) read_cache(cj.at("l1d"), "cache.l1d", c.cache.l1d);
    if (cj.contains("l2")) read_cache(cj.at("l2"), "cache.l2", c.cache.l2);
    read(cj, "dram_latency", c.cache.dram_latency);
  }
  if (j.contains("minor")) {
    check_keys(j.at("minor"), "minor", {"perfect_icache"});
    read(j.at("minor"), "perfect_icache", c.minor.perfect_icache);
  }
  if (j.contains("o3")) {
    const json& o = j.at("o3");
    check_keys(o, "o3", {"rob_size", "fetch_width", "issue_width", "commit_width", "int_alu", "int_muldiv", "fp_fma",
                         "mem_ports", "load_queue", "store_queue", "mispredict_penalty", "perfect_icache"});
    read(o, "rob_size", c.o3.rob_size);
    read(o, "fetch_width", c.o3.fetch_width);
    read(o, "issue_width", c.o3.issue_width);
    read(o, "commit_width", c.o3.commit_width);
    read(o, "int_alu", c.o3.int_alu);
    read(o, "int_muldiv", c.o3.int_muldiv);
    read(o, "fp_fma", c.o3.fp_fma);
    read(o, "mem_ports", c.o3.mem_ports);
    read(o, "load_queue", c.o3.load_queue);
    read(o, "store_queue", c.o3.store_queue);
    read(o, "mispredict_penalty", c.o3.mispredict_penalty);
    read(o, "perfect_icache", c.o3.perfect_icache);
  }
  c.validate();
  return c;
}

inline RunConfig config_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// RVMB_SEED, when set to an unsigned integer, replaces the config seed.
inline void apply_environment(RunConfig& c) {
  const char* s = std::getenv("RVMB_SEED");
  if (s == nullptr || *s == '\0') return;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 0);
    if (s[used] != '\0') throw std::invalid_argument(s);
    c.seed = v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("RVMB_SEED is not an unsigned integer: ") + s);
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = config_from_string(ss.str());
  apply_environment(c);
  return c;
}

}  // namespace rvmb::harness
