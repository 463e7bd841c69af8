#pragma once

#include <stdexcept>
#include <string>

namespace msa {

/* Base class for all domain errors raised by this library. */
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeMismatch : public Error {
  public:
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

/* Conditional distribution requested at an input with zero marginal mass. */
class ZeroMarginal : public Error {
  public:
    explicit ZeroMarginal(const std::string& msg) : Error(msg) {}
};

/* D places mass where the reference distribution has none; the divergence
 * is infinite. */
class SupportViolation : public Error {
  public:
    explicit SupportViolation(const std::string& msg) : Error(msg) {}
};

/* Cross-entropy loss evaluated on a nonpositive probability. */
class NonpositiveProbability : public Error {
  public:
    explicit NonpositiveProbability(const std::string& msg) : Error(msg) {}
};

class NonpositiveEta : public Error {
  public:
    explicit NonpositiveEta(const std::string& msg) : Error(msg) {}
};

/* Per-input normalizer of a combined hypothesis vanished. */
class DegenerateNormalizer : public Error {
  public:
    explicit DegenerateNormalizer(const std::string& msg) : Error(msg) {}
};

class ConditionalUndefined : public Error {
  public:
    explicit ConditionalUndefined(const std::string& msg) : Error(msg) {}
};

/* Numerator of the combined hypothesis is zero at a weighted point, so the
 * log terms of the cross-entropy decomposition are undefined. */
class NonpositiveJz : public Error {
  public:
    explicit NonpositiveJz(const std::string& msg) : Error(msg) {}
};

class GridTooLarge : public Error {
  public:
    explicit GridTooLarge(const std::string& msg) : Error(msg) {}
};

/* Finite-difference probe would leave the simplex. */
class InfeasibleProbe : public Error {
  public:
    explicit InfeasibleProbe(const std::string& msg) : Error(msg) {}
};

class EmptySample : public Error {
  public:
    explicit EmptySample(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

}  // namespace msa
