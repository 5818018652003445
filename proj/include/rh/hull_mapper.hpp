#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rh/continuation.hpp"
#include "rh/disc_system.hpp"

namespace rh {

// Boundary of one hull fiber {w : P(w) = 1} over an interior base point.
// Witness states live in the recentered pulled-back coordinates: the
// boundary point is center + F(0) and the disc level is t = 1.
struct FiberBoundarySample {
  cd z0;
  VecC center;  // analytic-center value at z0 (pulled back)
  std::vector<VecC> rays;
  std::vector<double> radius;
  std::vector<VecC> boundary;
  std::vector<DiscState> witnesses;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;  // ray index, angle of first component, radius
};

struct HullOpts {
  int degree = 16;
  TrackOpts track;
  double radius_tol = 1e-6;
  double mobius_rot = 0.0;  // alternative Moebius normalization
  double inside_tol = 1e-8;
};

// Bisection on P = 1 along each unit ray direction from the center.
FiberBoundarySample fiber_boundary(DfPtr df, cd z0,
                                   const std::vector<VecC>& rays,
                                   const HullOpts& opts = {});

// (P(w0) <= 1 + tol, witness disc through the point when inside).
std::pair<bool, std::optional<DiscState>> hull_membership(
    DfPtr df, cd z0, const VecC& w0, const HullOpts& opts = {});

}  // namespace rh
