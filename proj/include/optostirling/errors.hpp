#pragma once

#include <stdexcept>
#include <string>

namespace optostirling {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// kappa_eff <= 0: feedback gain exceeds the cavity loss.
class DegenerateCavity : public Error {
public:
    using Error::Error;
};

// 1 - |mu|^2 chi(w) chi(-w)* vanishes.
class ResponsePole : public Error {
public:
    using Error::Error;
};

// gamma + Gamma_m <= 0, no steady state exists.
class HeatingRunaway : public Error {
public:
    using Error::Error;
};

// omega_m + Delta_m <= 0.
class NegativeFrequency : public Error {
public:
    using Error::Error;
};

class EmptyLevel : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class NoClosedLoop : public Error {
public:
    using Error::Error;
};

class StepFailure : public Error {
public:
    using Error::Error;
};

class NotAnEngine : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace optostirling
