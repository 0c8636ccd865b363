#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/tensorc/ir.hpp"
#include "rvmb/tensorc/shapes.hpp"

namespace rvmb::tensorc {

// Text graph format, one statement per line, '#' starts a comment:
//
//   <name> = <kind> [operand ...] [key=value ...] [: <shape>]
//   output <name>
//
// kinds: input const matmul conv2d fc add relu maxpool2d avgpool2d flatten
// shapes are written 1x28x28x1. input and const take the shape as their
// first positional argument. const also takes seed=<n> [scale=<f>] or
// values=<f>,<f>,... . conv2d takes stride=<n> padding=valid|same; pools
// take window=<n> stride=<n>. A trailing ": <shape>" is checked against
// the inferred shape.
//
//   x  = input 1x28x28x1
//   w  = const 6x5x5x1 seed=7 scale=0.2
//   b  = const 6 values=0,0,0,0,0,0
//   c  = conv2d x w b stride=1 padding=valid : 1x24x24x6
//   r  = relu c
//   output r

namespace text_detail {

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline TensorType parse_shape(int line, std::string_view s) {
  TensorType t;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t x = s.find('x', start);
    if (x == std::string_view::npos) x = s.size();
    int64_t v = 0;
    auto part = s.substr(start, x - start);
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || part.empty()) {
      fail(line, "bad shape '" + std::string(s) + "'");
    }
    t.dims.push_back(v);
    start = x + 1;
  }
  if (!t.valid()) fail(line, "shape '" + std::string(s) + "' must have rank 1..4 and positive extents");
  return t;
}

inline int64_t parse_int(int line, const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) fail(line, key + " expects an integer, got '" + v + "'");
  return out;
}

inline float parse_float(int line, const std::string& v) {
  try {
    std::size_t used = 0;
    const float f = std::stof(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return f;
  } catch (const std::exception&) {
    fail(line, "bad number '" + v + "'");
  }
}

inline int64_t window_arg(int line, const std::string& key, const std::string& v) {
  // "2" or "2x2" (square only)
  auto x = v.find('x');
  if (x == std::string::npos) return parse_int(line, key, v);
  const int64_t a = parse_int(line, key, v.substr(0, x));
  if (parse_int(line, key, v.substr(x + 1)) != a) fail(line, key + " must be square");
  return a;
}

}  // namespace text_detail

inline TensorProgram parse_program(std::string_view text) {
  using namespace text_detail;
  static const std::map<std::string, OpKind, std::less<>> kinds = {
      {"input", OpKind::Input},     {"const", OpKind::Const},         {"matmul", OpKind::MatMul},
      {"conv2d", OpKind::Conv2D},   {"fc", OpKind::FullyConnected},   {"add", OpKind::Add},
      {"relu", OpKind::Relu},       {"maxpool2d", OpKind::MaxPool2D}, {"avgpool2d", OpKind::AvgPool2D},
      {"flatten", OpKind::Flatten}};

  TensorProgram p;
  std::vector<std::pair<std::size_t, TensorType>> annotations;
  std::vector<int> op_lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);

    std::optional<TensorType> annotated;
    if (auto c = line.find(':'); c != std::string_view::npos) {
      auto w = words(line.substr(c + 1));
      if (w.size() != 1) fail(line_no, "expected one shape after ':'");
      annotated = parse_shape(line_no, w[0]);
      line = line.substr(0, c);
    }
    auto w = words(line);
    if (w.empty()) continue;

    if (w[0] == "output") {
      if (w.size() != 2) fail(line_no, "expected 'output <name>'");
      p.output = p.find(w[1]);
      if (p.output < 0) fail(line_no, "unknown op '" + w[1] + "'");
      continue;
    }
    if (w.size() < 3 || w[1] != "=") fail(line_no, "expected '<name> = <kind> ...'");
    if (p.find(w[0]) >= 0) fail(line_no, "duplicate name '" + w[0] + "'");
    auto kind = kinds.find(w[2]);
    if (kind == kinds.end()) fail(line_no, "unknown op kind '" + w[2] + "'");

    TensorOp op;
    op.name = w[0];
    op.kind = kind->second;
    std::map<std::string, std::string> attrs;
    std::vector<std::string> positional;
    for (std::size_t i = 3; i < w.size(); ++i) {
      if (auto eq = w[i].find('='); eq != std::string::npos) attrs[w[i].substr(0, eq)] = w[i].substr(eq + 1);
      else positional.push_back(w[i]);
    }
    auto take = [&](const std::string& key) -> std::optional<std::string> {
      auto it = attrs.find(key);
      if (it == attrs.end()) return std::nullopt;
      std::string v = it->second;
      attrs.erase(it);
      return v;
    };

    if (op.kind == OpKind::Input || op.kind == OpKind::Const) {
      if (positional.size() != 1) fail(line_no, std::string(kind_name(op.kind)) + " expects a shape");
      op.type = parse_shape(line_no, positional[0]);
      if (op.kind == OpKind::Const) {
        auto seed = take("seed");
        auto scale = take("scale");
        auto values = take("values");
        if (seed && !values) {
          op.values = uniform_values(static_cast<uint64_t>(parse_int(line_no, "seed", *seed)), op.type->elements(),
                                     scale ? parse_float(line_no, *scale) : 1.0f);
        } else if (values && !seed && !scale) {
          std::string v = *values;
          std::size_t s = 0;
          while (s <= v.size()) {
            std::size_t comma = v.find(',', s);
            if (comma == std::string::npos) comma = v.size();
            op.values.push_back(parse_float(line_no, v.substr(s, comma - s)));
            s = comma + 1;
          }
          if (static_cast<int64_t>(op.values.size()) != op.type->elements()) {
            fail(line_no, "const '" + op.name + "' has " + std::to_string(op.values.size()) + " values for shape " +
                              op.type->str());
          }
        } else {
          fail(line_no, "const needs seed=<n> [scale=<f>] or values=<list>");
        }
      }
    } else {
      for (const std::string& name : positional) {
        const int ref = p.find(name);
        if (ref < 0) fail(line_no, "unknown operand '" + name + "'");
        op.operands.push_back(ref);
      }
      if (op.operands.size() != arity(op.kind)) {
        fail(line_no, std::string(kind_name(op.kind)) + " expects " + std::to_string(arity(op.kind)) + " operands");
      }
      if (auto s = take("stride")) op.stride_h = op.stride_w = window_arg(line_no, "stride", *s);
      if (auto s = take("window")) op.window_h = op.window_w = window_arg(line_no, "window", *s);
      if (auto s = take("padding")) {
        if (*s == "valid") op.padding = Padding::Valid;
        else if (*s == "same") op.padding = Padding::Same;
        else fail(line_no, "padding must be valid or same");
      }
      if ((op.kind == OpKind::MaxPool2D || op.kind == OpKind::AvgPool2D) && op.window_h == 0) {
        fail(line_no, "pool needs window=<n>");
      }
    }
    if (!attrs.empty()) fail(line_no, "unknown attribute '" + attrs.begin()->first + "'");
    if (annotated) annotations.emplace_back(p.ops.size(), *annotated);
    op_lines.push_back(line_no);
    p.ops.push_back(std::move(op));
  }
  if (p.ops.empty()) fail(line_no, "no ops");
  if (p.output < 0) p.output = static_cast<int>(p.ops.size()) - 1;

  TensorProgram typed = infer_shapes(std::move(p));
  for (const auto& [index, type] : annotations) {
    if (*typed.ops[index].type != type) {
      throw Error(ErrorCode::ShapeMismatch, "line " + std::to_string(op_lines[index]) + ": op '" +
                                                typed.ops[index].name + "' has shape " + typed.ops[index].type->str() +
                                                ", annotated " + type.str());
    }
  }
  return typed;
}

/// Writes a program in the text format. Const values are written out in
/// full (values=...), so parse_program(to_text(p)) reproduces p.
inline std::string to_text(const TensorProgram& p) {
  std::ostringstream out;
  out.precision(9);
  for (const TensorOp& op : p.ops) {
    out << op.name << " = " << kind_name(op.kind);
    if (op.kind == OpKind::Input || op.kind == OpKind::Const) out << ' ' << op.type->str();
    for (int o : op.operands) out << ' ' << p.ops[static_cast<std::size_t>(o)].name;
    if (op.kind == OpKind::Const) {
      out << " values=";
      for (std::size_t i = 0; i < op.values.size(); ++i) out << (i ? "," : "") << op.values[i];
    }
    if (op.kind == OpKind::Conv2D) {
      out << " stride=" << op.stride_h << " padding=" << (op.padding == Padding::Same ? "same" : "valid");
    }
    if (op.kind == OpKind::MaxPool2D || op.kind == OpKind::AvgPool2D) {
      out << " window=" << op.window_h << " stride=" << op.stride_h;
    }
    if (op.type) out << " : " << op.type->str();
    out << '\n';
  }
  out << "output " << p.ops[static_cast<std::size_t>(p.output)].name << '\n';
  return out.str();
}

}  // namespace rvmb::tensorc
