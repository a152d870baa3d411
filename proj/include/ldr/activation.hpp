#pragma once

#include "ldr/types.hpp"

#include <cmath>
#include <string>

namespace ldr {

enum class Activation { sigmoid, relu, identity, binary_step };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::identity: return "identity";
        case Activation::binary_step: return "binary_step";
    }
    return "?";
}

inline Activation activation_from_name(const std::string& name) {
    for (Activation a : {Activation::sigmoid, Activation::relu, Activation::identity,
                         Activation::binary_step}) {
        if (name == activation_name(a)) return a;
    }
    throw ValidationError("unknown activation: " + name);
}

inline double activate(Activation a, double t) {
    switch (a) {
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-t));
        case Activation::relu: return t > 0.0 ? t : 0.0;
        case Activation::identity: return t;
        case Activation::binary_step: return t >= 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

/// Derivative at pre-activation t. relu'(0) = 0; binary_step has zero
/// derivative wherever it exists and is excluded from gradient training.
inline double activate_derivative(Activation a, double t) {
    switch (a) {
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-t));
            return s * (1.0 - s);
        }
        case Activation::relu: return t > 0.0 ? 1.0 : 0.0;
        case Activation::identity: return 1.0;
        case Activation::binary_step: return 0.0;
    }
    return 0.0;
}

inline Vec activate(Activation a, const Vec& t) {
    Vec y(t.size());
    for (Index i = 0; i < t.size(); ++i) y[i] = activate(a, t[i]);
    return y;
}

}  // namespace ldr
