#ifndef BDMM_ERRORS_HPP
#define BDMM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace bdmm {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class NonStochastic : public Error {
public:
  using Error::Error;
};

class NotRegular : public Error {
public:
  using Error::Error;
};

class UnknownSymbol : public Error {
public:
  UnknownSymbol(const std::string& msg, long long position)
      : Error(msg), position(position) {}
  long long position;
};

class NonBinaryAlphabet : public Error {
public:
  using Error::Error;
};

class NoConditioningEvents : public Error {
public:
  using Error::Error;
};

class AlphabetMismatch : public Error {
public:
  using Error::Error;
};

class ZeroProbabilitySequence : public Error {
public:
  using Error::Error;
};

class StarvedState : public Error {
public:
  StarvedState(const std::string& msg, int state) : Error(msg), state(state) {}
  int state;
};

class NonMonotoneLikelihood : public Error {
public:
  NonMonotoneLikelihood(const std::string& msg, std::vector<double> trace)
      : Error(msg), trace(std::move(trace)) {}
  std::vector<double> trace;
};

class ComplexEigenvalues : public Error {
public:
  using Error::Error;
};

class NonStochasticResult : public Error {
public:
  using Error::Error;
};

class NumericalFailure : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace bdmm

#endif  // BDMM_ERRORS_HPP
