#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace carleman {

/// Value-or-refusal result. A refusal is an expected negative answer
/// (e.g. a system that does not meet a hypothesis), not an error.
template <class T>
class Outcome {
public:
  static Outcome accept(T value) {
    Outcome o;
    o.value_ = std::move(value);
    return o;
  }
  static Outcome refuse(std::string reason) {
    Outcome o;
    o.reason_ = std::move(reason);
    return o;
  }

  bool ok() const { return value_.has_value(); }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!value_) throw std::logic_error("Outcome::value on refusal: " + reason_);
    return *value_;
  }
  const std::string& refusal() const { return reason_; }

private:
  std::optional<T> value_;
  std::string reason_;
};

}  // namespace carleman
