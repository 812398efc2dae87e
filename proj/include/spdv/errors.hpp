#pragma once

#include <stdexcept>
#include <string>

namespace spdv {

/// Requested scheme needs 4*kappa*theta > xi^2 and the parameters violate it.
class FellerTooSmall : public std::runtime_error {
public:
    explicit FellerTooSmall(const std::string& what) : std::runtime_error(what) {}
};

/// SVI total variance went negative somewhere on the clamped domain.
class NegativeSviTotalVariance : public std::runtime_error {
public:
    explicit NegativeSviTotalVariance(const std::string& what) : std::runtime_error(what) {}
};

/// Moment order outside the admissible range for the requested horizon formula.
class POutOfRange : public std::runtime_error {
public:
    explicit POutOfRange(const std::string& what) : std::runtime_error(what) {}
};

/// Feller-ratio hypothesis of the rate theorem fails for the requested scheme.
class FellerGateFailed : public std::runtime_error {
public:
    explicit FellerGateFailed(const std::string& what) : std::runtime_error(what) {}
};

/// Slope fit has fewer than three statistically resolved ladder levels.
class InsufficientResolvedLevels : public std::runtime_error {
public:
    explicit InsufficientResolvedLevels(const std::string& what) : std::runtime_error(what) {}
};

/// Config file failed validation; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A simulation or estimator produced a non-finite number.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spdv
