#pragma once

#include <stdexcept>
#include <vector>

#include "opk/rkhs/feature.hpp"
#include "opk/rkhs/gram.hpp"

namespace opk {

//! Coherent frame over sample points: the Gram system together with its
//! whitening transform (truncated inverse square root of the Gram matrix).
struct CoherentFrame {
  GramSystem system;
  Whitener whitener;

  int dim() const { return system.dim(); }
  int rank() const { return whitener.rank; }
  int fiber_dim() const { return system.fiber_dim(); }
  const std::vector<Point>& points() const { return system.points; }
  const ChartKernel& kernel() const { return system.kernel; }
};

//! Builds a coherent frame: assembles the Gram matrix, certifies positivity
//! (throwing when certification fails), then whitens with the spectral floor.
inline CoherentFrame build_frame(const ChartKernel& k, const std::vector<Point>& pts,
                                 double eig_floor = kGramEigTol) {
  CoherentFrame frame;
  frame.system = assemble_gram(k, pts);
  frame.system.eig_floor = eig_floor;
  const PositivityCertificate cert = certify_positivity(frame.system);
  if (!cert.pass) {
    throw std::domain_error("build_frame: Gram positivity certification failed");
  }
  frame.whitener = whiten(frame.system.gram);
  return frame;
}

}  // namespace opk
