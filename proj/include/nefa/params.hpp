#pragma once

#include <stdexcept>
#include <string>

namespace nefa {

enum class LevyFamily { ggp, tsb };

inline const char* family_name(LevyFamily f) {
    return f == LevyFamily::ggp ? "ggp" : "tsb";
}

inline LevyFamily family_from_name(const std::string& s) {
    if (s == "ggp") return LevyFamily::ggp;
    if (s == "tsb") return LevyFamily::tsb;
    throw std::invalid_argument("unknown levy family: " + s);
}

// Hyperparameters of the feature-growth model.
//   eta   > 0   overall rate
//   sigma < 1   stability index (sigma <= 0 gives finite-activity-like tails)
//   zeta  > 0   exponential tilt
//   xi    >= 0  exposure growth exponent (xi = 0 recovers constant exposure)
struct ModelParams {
    double eta = 1.0;
    double sigma = 0.5;
    double zeta = 1.0;
    double xi = 0.0;
    LevyFamily family = LevyFamily::ggp;

    void validate() const {
        if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
        if (!(sigma < 1.0)) throw std::invalid_argument("sigma must be < 1");
        if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be > 0");
        if (!(xi >= 0.0)) throw std::invalid_argument("xi must be >= 0");
    }
};

}  // namespace nefa
