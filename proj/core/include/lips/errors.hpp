#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lips {

/// @brief Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// @brief A requested footplate pose has no rod-closure solution.
class WorkspaceError : public Error {
 public:
  using Error::Error;
};

/// @brief A solved or commanded value violates a configured joint limit.
class LimitError : public Error {
 public:
  using Error::Error;
};

/// @brief The transmission is at a singularity and the mapping is not invertible.
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// @brief An iterative solve exhausted its iteration budget.
///
/// Carries the best iterate seen and its constraint residual so callers can
/// decide whether the partial answer is still usable.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, const Eigen::Vector2d& best_iterate,
                double residual)
      : Error(what), best_iterate_(best_iterate), residual_(residual) {}

  const Eigen::Vector2d& best_iterate() const { return best_iterate_; }
  double residual() const { return residual_; }

 private:
  Eigen::Vector2d best_iterate_;
  double residual_;
};

/// @brief Plant integration blew up (speed above the hard safety bound).
class Diverged : public Error {
 public:
  using Error::Error;
};

/// @brief A geometry description is malformed or physically impossible.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// @brief Declared pose limits contain poses the linkage cannot reach.
class InfeasibleWorkspace : public Error {
 public:
  using Error::Error;
};

/// @brief Input text is not well formed at the lexical or XML level.
class SyntaxError : public Error {
 public:
  using Error::Error;
};

/// @brief Input parses but violates the expected document structure.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// @brief A joint graph is not a tree rooted at a single base link.
class LoopError : public Error {
 public:
  using Error::Error;
};

/// @brief A robot model cannot be bound to the ankle joint convention.
class BindError : public Error {
 public:
  using Error::Error;
};

}  // namespace lips
