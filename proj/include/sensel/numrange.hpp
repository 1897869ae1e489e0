#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "sensel/types.hpp"

namespace sensel {

// A point (x, y) = (v'Av, v'Bv) of the joint numerical range of two
// quadratic forms over the unit sphere.
enum class PointSource { vertex, interpolated };

struct RangePoint {
  double t = 0;  // boundary parameter
  double x = 0;
  double y = 0;
  std::optional<VectorXd> generator;  // unit-norm v, present for vertices
  PointSource source = PointSource::vertex;
  int seg_lo = -1, seg_hi = -1;  // bracketing vertex grid indices (interp)
  bool approximate = false;
};

struct BoundarySample {
  std::vector<RangePoint> points;     // ordered by t
  std::vector<int> vertex_position;   // grid index k -> position in points
  int grid_size = 0;                  // K
  int interp_count = 0;               // J
  double gap_threshold = 0;
};

// Samples the boundary of R(A, B): for t_k = (k-1) 2pi/K takes the minimal
// eigenpair of A cos t + B sin t; gaps wider than gap_threshold are bridged
// with J-1 interpolated chord points. gap_threshold <= 0 selects
// 0.01 * (bounding-box diagonal of the vertex cloud). For n < 3 the sampled
// curve need not cover the whole boundary; the +-canonical directions are
// appended as extra certified points.
BoundarySample boundary_sample(const MatrixXd& A, const MatrixXd& B, int K,
                               int J, double gap_threshold = 0);

// Best sampled point under `objective`; ties go to the smallest t, then to
// vertices over interpolated points. Throws if the objective is non-finite
// at any sample point.
const RangePoint& maximize_over_boundary(
    const BoundarySample& sample,
    const std::function<double(double, double)>& objective);

// Unit-norm v with v'Av = x, v'Bv = y (1e-6 absolute). Vertices return the
// stored eigenvector; interpolated points are solved in the span of the two
// bracketing eigenvectors by bisection on the rotation angle. Falls back to
// the nearest vertex generator if no accurate solution exists, setting
// *approximate.
VectorXd reconstruct_generator(const MatrixXd& A, const MatrixXd& B,
                               const RangePoint& point,
                               const BoundarySample& sample,
                               bool* approximate = nullptr);

// CSV rows (t, x, y, source) for plotting.
void dump_csv(const BoundarySample& sample, std::ostream& os);

}  // namespace sensel
