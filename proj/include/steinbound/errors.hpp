#pragma once

#include <stdexcept>
#include <string>

namespace steinbound {

/// A constructor or operation argument is outside its documented range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two independent numerical routes to the same quantity disagree.
class NumericConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested problem size exceeds the supported cap.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Reading or writing a report file failed; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steinbound
