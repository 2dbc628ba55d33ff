#pragma once

#include <stdexcept>
#include <string>

namespace asrbench {

// Root of every exception thrown by the harness.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class RulesError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class RunError : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Failures raised by transcription backends. Only CapacityError is retryable;
// everything else aborts the dataset run.
class AdapterError : public Error {
 public:
  using Error::Error;
  virtual bool retryable() const noexcept { return false; }
};

class CapacityError : public AdapterError {
 public:
  using AdapterError::AdapterError;
  bool retryable() const noexcept override { return true; }
};

class TransportError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class TimeoutError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class ProtocolError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class FatalAdapterError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

}  // namespace asrbench
