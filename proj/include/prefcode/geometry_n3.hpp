#pragma once
// Exact divergence partition of the 3-symbol simplex for two codebooks.
//
// The tie set {p : sum_n p_n log2(q1_n / q2_n) = 0} is a line; intersected
// with the simplex triangle it splits the domain into two convex polygons.
// Under a uniform preference the per-region center update is the area
// centroid, which this module computes in closed form. It exists to validate
// the sampled designers against exact geometry, not to scale beyond N = 3.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "prefcode/types.hpp"

namespace prefcode {

struct PartitionN3 {
  std::array<double, 3> line;  // boundary coefficients c_n = log2(q1_n/q2_n)
  std::array<std::array<double, 3>, 2> boundary;      // the segment endpoints
  std::vector<std::array<double, 3>> region_first;    // polygon closer to q1
  std::vector<std::array<double, 3>> region_second;   // polygon closer to q2
  std::array<double, 3> centroid_first;
  std::array<double, 3> centroid_second;
};

namespace detail {

// 2-D embedding of barycentric coordinates (area ratios are all we need, so
// any affine embedding works).
inline std::pair<double, double> embed(const std::array<double, 3>& p) {
  return {p[1] + 0.5 * p[2], 0.8660254037844386467637232 * p[2]};
}

inline double polygon_area2(const std::vector<std::array<double, 3>>& poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    auto [x1, y1] = embed(poly[i]);
    auto [x2, y2] = embed(poly[(i + 1) % poly.size()]);
    acc += x1 * y2 - x2 * y1;
  }
  return acc;  // twice the signed area
}

inline std::array<double, 3> polygon_centroid(const std::vector<std::array<double, 3>>& poly) {
  // Fan triangulation from vertex 0; barycentric coordinates are affine in
  // the plane, so area-weighted triangle centroids give the region centroid.
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    std::vector<std::array<double, 3>> tri{poly[0], poly[i], poly[i + 1]};
    double a = polygon_area2(tri);
    total += a;
    for (std::size_t c = 0; c < 3; ++c)
      acc[c] += a * (poly[0][c] + poly[i][c] + poly[i + 1][c]) / 3.0;
  }
  if (std::abs(total) < 1e-12) throw NoBoundary("degenerate region polygon");
  for (auto& v : acc) v /= total;
  return acc;
}

}  // namespace detail

/// Clips the simplex triangle by the divergence tie line between two strictly
/// positive 3-symbol codebooks and returns both polygons with their area
/// centroids (the uniform-preference center updates). Throws NoBoundary when
/// the codebooks tie everywhere or one region vanishes.
inline PartitionN3 exact_partition_n3(const Codebook& q1, const Codebook& q2) {
  if (q1.size() != 3 || q2.size() != 3)
    throw DimensionMismatch("exact_partition_n3 requires N = 3");
  for (std::size_t i = 0; i < 3; ++i)
    if (!(q1[i] > 0.0) || !(q2[i] > 0.0))
      throw std::invalid_argument("exact_partition_n3 requires strictly positive codebooks");

  PartitionN3 out;
  for (std::size_t i = 0; i < 3; ++i) out.line[i] = std::log2(q1[i] / q2[i]);
  double largest = 0.0;
  for (double c : out.line) largest = std::max(largest, std::abs(c));
  if (largest < 1e-12) throw NoBoundary("codebooks tie on the whole simplex");

  const std::array<std::array<double, 3>, 3> corners{
      std::array<double, 3>{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  auto side = [&](const std::array<double, 3>& p) {
    return p[0] * out.line[0] + p[1] * out.line[1] + p[2] * out.line[2];
  };

  // Sutherland-Hodgman style walk: collect vertices per side, inserting the
  // crossing point on each sign change.
  std::vector<std::array<double, 3>> first, second;
  std::vector<std::array<double, 3>> crossings;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& a = corners[i];
    const auto& b = corners[(i + 1) % 3];
    double sa = side(a), sb = side(b);
    if (sa >= 0.0) first.push_back(a);
    if (sa <= 0.0) second.push_back(a);
    if (sa == 0.0) crossings.push_back(a);  // corner exactly on the tie line
    if ((sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0)) {
      double t = sa / (sa - sb);
      std::array<double, 3> x;
      for (std::size_t c = 0; c < 3; ++c) x[c] = a[c] + t * (b[c] - a[c]);
      first.push_back(x);
      second.push_back(x);
      crossings.push_back(x);
    }
  }
  if (crossings.size() < 2 || first.size() < 3 || second.size() < 3)
    throw NoBoundary("tie line does not cross the simplex interior");

  out.boundary = {crossings[0], crossings[1]};
  out.region_first = std::move(first);
  out.region_second = std::move(second);
  out.centroid_first = detail::polygon_centroid(out.region_first);
  out.centroid_second = detail::polygon_centroid(out.region_second);
  return out;
}

}  // namespace prefcode
