#pragma once

#include "activecanvas/config.hpp"
#include "activecanvas/features.hpp"
#include "activecanvas/layout.hpp"

namespace activecanvas::refine {

struct RefineResult {
  Layout refined;          // touched rows updated, untouched rows untouched
  double mi_before = 0.0;  // objective at the incoming layout
  double mi_after = 0.0;   // objective at `refined`; never below mi_before
  int evaluations = 0;
};

/// MI between the reduced features and the positions, both restricted to the
/// touched rows. This is the single scalar refine_positions maximizes.
double objective(const features::FeatureMatrix& reduced, const Layout& layout,
                 const EngineConfig& config);

/// Block-coordinate ascent: `config.sweeps` passes over the touched items in
/// ascending id order, each running a bounded 2-D simplex on one item's
/// position while the others stay fixed. Each item stays within the
/// Chebyshev trust radius `config.delta` of where it started.
RefineResult refine_positions(const features::FeatureMatrix& reduced, const Layout& layout,
                              const EngineConfig& config);

}  // namespace activecanvas::refine
