#include "caproj/reference.hpp"

#include <algorithm>

namespace caproj {

Vector ReferenceSignal::at(double t) const {
    Vector out = Vector::Zero(3);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        for (const auto& pulse : channels[c]) {
            if (t >= pulse.start && t < pulse.end()) {
                out(static_cast<Index>(c)) = pulse.amplitude;
                break;
            }
        }
    }
    return out;
}

void ReferenceSignal::validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("reference duration must be positive");
    for (const auto& channel : channels) {
        auto sorted = channel;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Pulse& a, const Pulse& b) { return a.start < b.start; });
        double prev_end = 0.0;
        bool first = true;
        for (const auto& pulse : sorted) {
            if (pulse.start < 0.0 || pulse.duration <= 0.0) {
                throw std::invalid_argument("reference pulses need nonnegative start and positive duration");
            }
            if (!first && pulse.start < prev_end) {
                throw std::invalid_argument("reference pulses overlap within a channel");
            }
            prev_end = pulse.end();
            first = false;
        }
    }
}

}  // namespace caproj
