#pragma once

// A scripted 20-window tracker input that walks every branch, with the
// estimate sequence worked out by hand.

#include <cmath>
#include <vector>

#include "heartbeat/spectrum.hpp"
#include "heartbeat/tracker.hpp"

namespace heartbeat::fixture {

// 40..240 bpm grid with a single smooth bump at `bpm`.
inline Spectrum bump_spectrum(double bpm, double height = 1.0) {
  Spectrum s;
  s.grid_step_bpm = 0.2;
  for (int i = 0; i <= 1000; ++i) {
    const double b = 40.0 + 0.2 * i;
    s.freqs_hz.push_back(b / 60.0);
    s.power.push_back(height * std::exp(-0.5 * (b - bpm) * (b - bpm) / 4.0));
  }
  return s;
}

inline Peak peak(double bpm, double magnitude) { return {bpm / 60.0, bpm, magnitude}; }

struct ScriptedWindow {
  WindowObservation obs;
  double expected_bpm;
  TrackerBranch expected_branch;
  double expected_delta_h;  // limit in force while the window is decided
};

inline std::vector<ScriptedWindow> scripted_walk() {
  using B = TrackerBranch;
  const Spectrum flat = bump_spectrum(200.0, 0.01);
  auto w = [&](std::vector<Peak> p1, std::vector<Peak> p2, double bpm, B branch, double dh) {
    return ScriptedWindow{{flat, std::move(p1), std::move(p2)}, bpm, branch, dh};
  };
  std::vector<ScriptedWindow> s;
  // 1-3: bootstrap on the channel-1 argmax; peak lists are ignored.
  s.push_back({{bump_spectrum(70.0), {peak(150, 9)}, {}}, 70, B::kBootstrap, 12});
  s.push_back({{bump_spectrum(72.0), {}, {peak(100, 9)}}, 72, B::kBootstrap, 12});
  s.push_back({{bump_spectrum(74.0), {}, {}}, 74, B::kBootstrap, 12});
  // 4: one valid peak in [62, 86]; 120 is out of range despite its size.
  s.push_back(w({peak(78, 2), peak(120, 9)}, {}, 78, B::kSelect, 12));
  // 5: two valid peaks across channels, the larger wins.
  s.push_back(w({peak(80, 1)}, {peak(84, 3)}, 84, B::kSelect, 12));
  // 6: equal magnitudes, 88 is 4 away from 84 and 79 is 5 away.
  s.push_back(w({peak(88, 2)}, {peak(79, 2)}, 88, B::kSelect, 12));
  // 7-10: nothing valid; hold four times while the limit grows by 5.
  s.push_back(w({peak(130, 5)}, {}, 88, B::kHold, 12));
  s.push_back(w({peak(106, 5)}, {}, 88, B::kHold, 17));
  s.push_back(w({peak(111, 5)}, {}, 88, B::kHold, 22));
  s.push_back(w({}, {peak(116, 5)}, 88, B::kHold, 27));
  // 11: still nothing in [56, 120]; the regression over windows 1-10
  // (70 72 74 78 84 88 88 88 88 88) extrapolates to ~94.4 > 88, so +5.
  s.push_back(w({peak(121, 5)}, {}, 93, B::kPredict, 32));
  // 12: limit is 40 after the prediction; 95 is valid, 140 is not.
  s.push_back(w({peak(95, 4)}, {peak(140, 8)}, 95, B::kSelect, 40));
  s.push_back(w({peak(97, 3)}, {}, 97, B::kSelect, 12));
  // 14: empty lists are a hold.
  s.push_back(w({}, {}, 97, B::kHold, 12));
  // 15: limit 17, so 112 in [80, 114] is reachable.
  s.push_back(w({peak(112, 2)}, {}, 112, B::kSelect, 17));
  // 16: equal magnitude and equal distance: the lower bpm.
  s.push_back(w({peak(116, 2)}, {peak(108, 2)}, 108, B::kSelect, 12));
  // 17: 104 and 107 tie on magnitude; 107 is closer to 108.
  s.push_back(w({peak(110, 1), peak(104, 1.5)}, {peak(107, 1.5)}, 107, B::kSelect, 12));
  s.push_back(w({peak(106, 1)}, {}, 106, B::kSelect, 12));
  // 19: the interval is closed, 118 = 106 + 12 is valid.
  s.push_back(w({peak(118, 1)}, {}, 118, B::kSelect, 12));
  s.push_back(w({}, {peak(131, 1)}, 118, B::kHold, 12));
  return s;
}

}  // namespace heartbeat::fixture
