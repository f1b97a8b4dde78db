#pragma once

#include <stdexcept>
#include <string>

namespace lrmsim {

enum class ErrorCode { InvalidParameter = 1, RangeError = 2, Io = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail_invalid(const std::string& what) {
    throw Error(ErrorCode::InvalidParameter, what);
}

[[noreturn]] inline void fail_range(const std::string& what) {
    throw Error(ErrorCode::RangeError, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail_invalid(what);
}

}  // namespace lrmsim
