#pragma once

#include <stdexcept>
#include <string>

namespace gridswitch {

/// Bad input data: schema violations, unknown element ids, invalid parameters.
/// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Analysis cannot proceed: islanded network, infeasible dispatch, singular system.
/// Maps to CLI exit code 2.
class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridswitch
