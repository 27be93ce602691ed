#pragma once

#include <stdexcept>
#include <string>

namespace graspkit {

// Base class for all toolkit errors. Subclasses name the failed contract.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateScale : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };

struct EmptyMesh : Error { using Error::Error; };
struct EmptyCloud : Error { using Error::Error; };
struct EmptyForeground : Error { using Error::Error; };
struct EmptySurface : Error { using Error::Error; };
struct DegenerateVertex : Error { using Error::Error; };

struct UnknownStrategy : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct MissingLabels : Error { using Error::Error; };
struct FrameMismatch : Error { using Error::Error; };

struct NoGraspableVertex : Error { using Error::Error; };
struct DegenerateNormal : Error { using Error::Error; };
struct DegenerateAxis : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

// Pipeline stage failure wrapper; keeps the failing stage name addressable.
struct StageError : Error {
  StageError(const std::string& stage_name, const std::string& what_arg)
      : Error(stage_name + ": " + what_arg), stage(stage_name) {}
  std::string stage;
};

}  // namespace graspkit
