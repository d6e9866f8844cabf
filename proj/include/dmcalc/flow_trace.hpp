#pragma once

#include <vector>

#include "dmcalc/gleason.hpp"

namespace dmcalc {

/// Per-step diagnostics of an iterated or integrated flow of densities.
struct FlowStep {
  double time = 0.0;
  Density state;
  double trace_drift = 0.0;       // |tr - 1| before renormalization
  double overlap = 0.0;           // |<top evec(state), top evec(target)>|
  double step_norm = 0.0;         // ||state_t - state_{t-1}||_F
};

struct FlowTrace {
  std::vector<FlowStep> steps;

  const Density& final_state() const { return steps.back().state; }
};

}  // namespace dmcalc
