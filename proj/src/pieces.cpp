#include "jaqm/pieces.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace jaqm::pieces {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, SmoothPiece> pieces;
};

Registry& registry() {
  static Registry r;
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("bad number '" + std::string(s) + "' in piece '" + std::string(context) + "'");
  }
  return v;
}

}  // namespace

SmoothPiece constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, "const(" + num(c) + ")"};
}

SmoothPiece linear(double a) {
  return {[a](double x) { return a * x; }, [a](double) { return a; }, "linear(" + num(a) + ")"};
}

SmoothPiece affine(double c, double a) {
  return {[c, a](double x) { return c + a * x; }, [a](double) { return a; },
          "affine(" + num(c) + ", " + num(a) + ")"};
}

SmoothPiece sine(double amplitude, double frequency, double phase, double offset) {
  return {[=](double x) { return offset + amplitude * std::sin(frequency * x + phase); },
          [=](double x) { return amplitude * frequency * std::cos(frequency * x + phase); },
          "sin(" + num(amplitude) + ", " + num(frequency) + ", " + num(phase) + ", " + num(offset) + ")"};
}

void register_named(const std::string& name, SmoothPiece piece) {
  if (name.empty()) throw ConfigError("named piece needs a non-empty name");
  piece.label = "named(" + name + ")";
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.pieces[name] = std::move(piece);
}

SmoothPiece named(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  const auto it = r.pieces.find(name);
  if (it == r.pieces.end()) throw ConfigError("no piece registered under the name '" + name + "'");
  return it->second;
}

std::vector<std::string> registered_names() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> out;
  for (const auto& [name, piece] : r.pieces) out.push_back(name);
  return out;
}

SmoothPiece parse(std::string_view text) {
  const std::string_view t = trim(text);
  const auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    throw ConfigError("piece '" + std::string(t) + "' is not of the form family(args)");
  }
  const std::string_view family = trim(t.substr(0, open));
  const std::string_view inner = t.substr(open + 1, t.size() - open - 2);

  if (family == "named") return named(std::string(trim(inner)));

  std::vector<double> args;
  std::size_t start = 0;
  while (start <= inner.size()) {
    const auto comma = inner.find(',', start);
    const auto part = inner.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(part).empty() || comma != std::string_view::npos) args.push_back(parse_number(part, t));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }

  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ConfigError("piece '" + std::string(t) + "' has the wrong number of arguments");
    }
  };
  if (family == "const" || family == "constant") {
    want(1, 1);
    return constant(args[0]);
  }
  if (family == "linear") {
    want(1, 1);
    return linear(args[0]);
  }
  if (family == "affine") {
    want(2, 2);
    return affine(args[0], args[1]);
  }
  if (family == "sin") {
    want(2, 4);
    args.resize(4, 0.0);
    return sine(args[0], args[1], args[2], args[3]);
  }
  throw ConfigError("unknown piece family '" + std::string(family) + "'");
}

}  // namespace jaqm::pieces
