#pragma once

#include <stdexcept>
#include <string>

namespace delaynet {

// Base type for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vertex indices are reported 1-based, matching the I/O convention.
struct SelfLoop : Error {
  explicit SelfLoop(int vertex_)
      : Error("self-loop at vertex " + std::to_string(vertex_ + 1)), vertex(vertex_) {}
  int vertex;
};

struct IndexOutOfRange : Error {
  IndexOutOfRange(int vertex_, int n_)
      : Error("vertex " + std::to_string(vertex_ + 1) + " out of range for n=" +
              std::to_string(n_)),
        vertex(vertex_) {}
  int vertex;
};

struct TooFewAgents : Error {
  explicit TooFewAgents(int n_)
      : Error("network needs at least 2 agents, got " + std::to_string(n_)), n(n_) {}
  int n;
};

struct NonUnitDiagonal : Error {
  explicit NonUnitDiagonal(int layer_)
      : Error("pattern diagonal entry " + std::to_string(layer_ + 1) +
              " must equal 1"),
        layer(layer_) {}
  int layer;
};

struct BadDimension : Error {
  using Error::Error;
};

struct EigenFailure : Error {
  using Error::Error;
};

struct HypothesisViolated : Error {
  using Error::Error;
};

struct DisconnectedGraph : Error {
  DisconnectedGraph() : Error("graph is not connected") {}
};

struct StepTooLarge : Error {
  using Error::Error;
};

struct NonFiniteState : Error {
  explicit NonFiniteState(double t)
      : Error("non-finite state at t=" + std::to_string(t) +
              " below the divergence threshold (numerical fault)"),
        time(t) {}
  double time;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace delaynet
