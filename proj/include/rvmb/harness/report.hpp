#pragma once

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rvmb/error.hpp"
#include "rvmb/harness/runner.hpp"

namespace rvmb::harness {

enum class Format { Csv, Json, Markdown };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "markdown" || s == "md") return Format::Markdown;
  throw Error(ErrorCode::InvalidConfig, "unknown report format '" + s + "'");
}

inline const std::string& csv_header() {
  static const std::string h =
      "benchmark,model,cycles,instructions,cpi,f_IntAlu,f_IntMult,f_IntDiv,f_MemRead,f_MemWrite,f_FloatAdd,"
      "f_FloatMult,f_FloatMultAcc,f_FloatDiv,f_FloatMisc,f_Branch,f_Jump,f_Other,l1d_mpki,l2_mpki,branch_acc,"
      "wall_s,kips,digest";
  return h;
}

/// Mix columns in CSV order.
inline const std::vector<isa::InstrClass>& csv_mix_order() {
  using C = isa::InstrClass;
  static const std::vector<C> order = {C::IntAlu,    C::IntMult,      C::IntDiv,   C::MemRead,   C::MemWrite,
                                       C::FloatAdd,  C::FloatMult,    C::FloatMultAcc, C::FloatDiv, C::FloatMisc,
                                       C::Branch,    C::Jump,         C::Other};
  return order;
}

inline std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fmt_digest(uint64_t d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, d);
  return buf;
}

namespace report_detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace report_detail

inline std::string to_csv(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports");
  std::string out = csv_header() + "\n";
  for (const MetricsReport& r : reports) {
    out += report_detail::csv_field(r.benchmark) + "," + report_detail::csv_field(r.model);
    if (!r.ok) {
      out += std::string(21, ',') + ",error:" + r.error_kind + "\n";
      continue;
    }
    out += "," + std::to_string(r.cycles) + "," + std::to_string(r.instructions) + "," + fmt_real(r.cpi);
    for (isa::InstrClass c : csv_mix_order()) out += "," + fmt_real(r.mix_of(c));
    out += "," + fmt_real(r.l1d_mpki) + "," + fmt_real(r.l2_mpki) + "," + fmt_real(r.branch_acc) + "," +
           fmt_real(r.wall_s) + "," + fmt_real(r.kips) + "," + fmt_digest(r.digest) + "\n";
  }
  return out;
}

inline std::vector<MetricsReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw Error(ErrorCode::ParseError, "missing CSV header");
  std::vector<MetricsReport> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = report_detail::split_csv_line(line);
    if (f.size() != 24) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 24 fields");
    MetricsReport r;
    r.benchmark = f[0];
    r.model = f[1];
    if (f[23].rfind("error:", 0) == 0) {
      r.ok = false;
      r.error_kind = f[23].substr(6);
      out.push_back(std::move(r));
      continue;
    }
    auto num = [&](std::size_t i) { return std::strtod(f[i].c_str(), nullptr); };
    r.cycles = std::strtoull(f[2].c_str(), nullptr, 10);
    r.instructions = std::strtoull(f[3].c_str(), nullptr, 10);
    r.cpi = num(4);
    for (std::size_t k = 0; k < csv_mix_order().size(); ++k) {
      r.mix[static_cast<std::size_t>(csv_mix_order()[k])] = num(5 + k);
    }
    r.l1d_mpki = num(18);
    r.l2_mpki = num(19);
    r.branch_acc = num(20);
    r.wall_s = num(21);
    r.kips = num(22);
    r.digest = std::strtoull(f[23].c_str(), nullptr, 16);
    out.push_back(std::move(r));
  }
  return out;
}

inline nlohmann::json to_json_value(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports");
  nlohmann::json arr = nlohmann::json::array();
  for (const MetricsReport& r : reports) {
    nlohmann::json j;
    j["benchmark"] = r.benchmark;
    j["model"] = r.model;
    j["ok"] = r.ok;
    if (!r.ok) {
      j["error"] = {{"kind", r.error_kind}, {"message", r.error_message}};
      if (r.error_pc) j["error"]["pc"] = *r.error_pc;
      arr.push_back(j);
      continue;
    }
    j["cycles"] = r.cycles;
    j["instructions"] = r.instructions;
    j["cpi"] = r.cpi;
    nlohmann::json mix = nlohmann::json::object();
    for (isa::InstrClass c : csv_mix_order()) mix[std::string(isa::class_name(c))] = r.mix_of(c);
    j["mix"] = mix;
    j["l1d_mpki"] = r.l1d_mpki;
    j["l2_mpki"] = r.l2_mpki;
    j["branch_acc"] = r.branch_acc;
    j["wall_s"] = r.wall_s;
    j["kips"] = r.kips;
    j["digest"] = fmt_digest(r.digest);
    nlohmann::json stalls = nlohmann::json::object();
    for (uarch::Stall s : uarch::kAllStalls) stalls[std::string(uarch::stall_name(s))] = r.stalls[static_cast<std::size_t>(s)];
    j["stall_cycles"] = stalls;
    arr.push_back(j);
  }
  return arr;
}

inline std::string to_json(const std::vector<MetricsReport>& reports) { return to_json_value(reports).dump(2) + "\n"; }

inline std::vector<MetricsReport> from_json(const std::string& text) {
  std::vector<MetricsReport> out;
  try {
    const nlohmann::json arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      MetricsReport r;
      r.benchmark = j.at("benchmark").get<std::string>();
      r.model = j.at("model").get<std::string>();
      r.ok = j.at("ok").get<bool>();
      if (!r.ok) {
        r.error_kind = j.at("error").at("kind").get<std::string>();
        r.error_message = j.at("error").value("message", "");
        if (j.at("error").contains("pc")) r.error_pc = j.at("error").at("pc").get<uint64_t>();
        out.push_back(std::move(r));
        continue;
      }
      r.cycles = j.at("cycles").get<uint64_t>();
      r.instructions = j.at("instructions").get<uint64_t>();
      r.cpi = j.at("cpi").get<double>();
      for (isa::InstrClass c : csv_mix_order()) {
        r.mix[static_cast<std::size_t>(c)] = j.at("mix").at(std::string(isa::class_name(c))).get<double>();
      }
      r.l1d_mpki = j.at("l1d_mpki").get<double>();
      r.l2_mpki = j.at("l2_mpki").get<double>();
      r.branch_acc = j.at("branch_acc").get<double>();
      r.wall_s = j.at("wall_s").get<double>();
      r.kips = j.at("kips").get<double>();
      r.digest = std::strtoull(j.at("digest").get<std::string>().c_str(), nullptr, 16);
      if (j.contains("stall_cycles")) {
        for (uarch::Stall s : uarch::kAllStalls) {
          r.stalls[static_cast<std::size_t>(s)] = j.at("stall_cycles").value(std::string(uarch::stall_name(s)), uint64_t{0});
        }
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad results JSON: ") + e.what());
  }
  return out;
}

inline std::string to_markdown(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports");
  std::ostringstream md;
  md << "## Results\n\n"
     << "| benchmark | model | cycles | instructions | CPI | mem % | FMA % | L1D MPKI | L2 MPKI | branch acc | KIPS | digest |\n"
     << "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---|\n";
  std::vector<std::string> bench_order;
  std::vector<std::string> model_order;
  std::map<std::pair<std::string, std::string>, const MetricsReport*> cells;
  for (const MetricsReport& r : reports) {
    if (std::find(bench_order.begin(), bench_order.end(), r.benchmark) == bench_order.end()) {
      bench_order.push_back(r.benchmark);
    }
    if (std::find(model_order.begin(), model_order.end(), r.model) == model_order.end()) {
      model_order.push_back(r.model);
    }
    cells[{r.benchmark, r.model}] = &r;
    md << "| " << r.benchmark << " | " << r.model << " | ";
    if (!r.ok) {
      md << "error: " << r.error_kind << " | | | | | | | | | |\n";
      continue;
    }
    const double mem = r.mix_of(isa::InstrClass::MemRead) + r.mix_of(isa::InstrClass::MemWrite);
    char row[512];
    std::snprintf(row, sizeof row, "%" PRIu64 " | %" PRIu64 " | %.3f | %.1f | %.1f | %.3f | %.3f | %.4f | %.0f | `%s` |\n",
                  r.cycles, r.instructions, r.cpi, 100.0 * mem, 100.0 * r.mix_of(isa::InstrClass::FloatMultAcc),
                  r.l1d_mpki, r.l2_mpki, r.branch_acc, r.kips, fmt_digest(r.digest).c_str());
    md << row;
  }

  md << "\n## Speedup over minor\n\n| benchmark |";
  for (const std::string& m : model_order) md << ' ' << m << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < model_order.size(); ++i) md << "---:|";
  md << '\n';
  for (const std::string& b : bench_order) {
    md << "| " << b << " |";
    auto base = cells.find({b, "minor"});
    for (const std::string& m : model_order) {
      auto it = cells.find({b, m});
      if (base == cells.end() || !base->second->ok || it == cells.end() || !it->second->ok || it->second->cycles == 0) {
        md << " n/a |";
        continue;
      }
      char cell[64];
      std::snprintf(cell, sizeof cell, " %.3f |",
                    static_cast<double>(base->second->cycles) / static_cast<double>(it->second->cycles));
      md << cell;
    }
    md << '\n';
  }
  return md.str();
}

inline std::string render(const std::vector<MetricsReport>& reports, Format f) {
  switch (f) {
    case Format::Csv: return to_csv(reports);
    case Format::Json: return to_json(reports);
    case Format::Markdown: return to_markdown(reports);
  }
  return {};
}

}  // namespace rvmb::harness
