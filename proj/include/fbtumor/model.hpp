#pragma once

namespace fbtumor {

// Physical constants of the model.  lambda is the nutrient time constant,
// fixed at 0 (quasi-steady nutrient).
struct ModelParams {
    double mu = 1.0;           // aggressiveness, 1/time, > 0
    double sigma_tilde = 0.5;  // threshold concentration, in (0,1)
    double tau = 0.0;          // time delay, >= 0
    double lambda = 0.0;

    void validate() const;  // throws std::invalid_argument
};

}  // namespace fbtumor
