// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "rcl/model.hpp"

namespace rcl::cli {

/// Bad flags, bad config, or a violated precondition: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "name" or "name:key=value,key=value". Known presets:
///
///   single                      1 site, T = 0, uniform[0, 1]
///   twosite                     T = [[0, 0.1], [0.1, 0]], uniform[0.1, 0.9]
///   anderson1d:n,t,lo,hi,dist   chain (defaults n=8 t=0.1 lo=0 hi=1 dist=uniform)
///   anderson2d:L,t,lo,hi,dist   square grid (defaults L=4 t=0.1 lo=0 hi=1)
///   critical1d:n,lo,hi,dist     -Laplacian + V/sqrt(n) (defaults n=100 lo=-1 hi=1)
///
/// dist is uniform or tent. Every preset except single and twosite is rescaled
/// to the unit window; those two already satisfy it.
ModelSpec parse_preset(const std::string& spec);

}  // namespace rcl::cli
