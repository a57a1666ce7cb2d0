#pragma once

// Built-in families of smooth pieces and a registry of user-named ones.
//
// Textual form, as used in config files:
//   const(c)                        c
//   linear(a)                       a*x
//   affine(c, a)                    c + a*x
//   sin(amp, freq[, phase[, off]])  off + amp*sin(freq*x + phase)
//   named(id)                       a piece registered with register_named

#include <string>
#include <string_view>
#include <vector>

#include "jaqm/coefficients.hpp"

namespace jaqm::pieces {

SmoothPiece constant(double c);
SmoothPiece linear(double a);
SmoothPiece affine(double c, double a);
SmoothPiece sine(double amplitude, double frequency, double phase = 0.0, double offset = 0.0);

/// Registers (or replaces) a named piece. Do this before any concurrent use.
void register_named(const std::string& name, SmoothPiece piece);
SmoothPiece named(const std::string& name);
std::vector<std::string> registered_names();

/// Parses one piece in the textual form above. Throws ConfigError.
SmoothPiece parse(std::string_view text);

inline PiecewiseSmoothFn smooth(SmoothPiece piece) { return PiecewiseSmoothFn(std::move(piece)); }

}  // namespace jaqm::pieces
