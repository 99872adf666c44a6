#pragma once

#include <stdexcept>
#include <string>

namespace agentinterp {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown, duplicate or empty label.
class LabelError : public Error {
public:
    using Error::Error;
};

// Objects defined over different sets were combined.
class DomainError : public Error {
public:
    using Error::Error;
};

// Unknown builtin name.
class RegistryError : public Error {
public:
    using Error::Error;
};

// Structurally invalid model (bad discount, non-finite reward, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

// An enumeration or reachability computation exceeded its configured budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Document field missing or of the wrong type.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Weights negative, non-finite or not summing to one.
class ProbabilityError : public Error {
public:
    using Error::Error;
};

}  // namespace agentinterp
