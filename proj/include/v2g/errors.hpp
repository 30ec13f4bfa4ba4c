#pragma once

#include <stdexcept>
#include <string>

namespace v2g {

/// Scenario or configuration problem. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while running a simulation. CLI maps this to exit code 3.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failure. CLI maps this to exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both switches of one inverter leg commanded on at once.
class ShootThroughError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Normal matrix of the control solve is singular and regularization is off.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace v2g
