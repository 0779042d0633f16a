#pragma once

#include <array>
#include <vector>

#include "caproj/types.hpp"

namespace caproj {

/// One rectangular reference piece: `amplitude` over [start, start+duration).
struct Pulse {
    double amplitude = 0.0;  // rad/s
    double start = 0.0;      // s
    double duration = 0.0;   // s

    double end() const { return start + duration; }
};

/// Piecewise-constant angular-rate references for the three output channels
/// (p, q, r). Pulses must not overlap within a channel; the signal is zero
/// outside every pulse.
struct ReferenceSignal {
    std::array<std::vector<Pulse>, 3> channels;
    double duration = 0.0;  // s

    Vector at(double t) const;
    void validate() const;
};

}  // namespace caproj
